//! The block-counting chain and the clocked recursive tree give the same
//! collision law; both are compared with the exact law of `J_n`.
//!
//! cargo run --release --example two_engines

use bscoal::coalescent::{simulate_chain, simulate_rrt_coalescent};
use bscoal::exact::exact_j_distribution;
use bscoal::rng::RngStream;
use bscoal::stats::{cut_count_experiment, CutEngine};

fn main() -> bscoal::error::Result<()> {
    let mut rng = RngStream::new(11, 0);
    let run = simulate_rrt_coalescent(10, &mut rng)?;
    for (e, p) in run.log.events.iter().zip(run.partitions.as_deref().unwrap_or(&[])) {
        println!("t = {:.4}: {} blocks merge  ->  {p}", e.time, e.merged);
    }
    let chain = simulate_chain(10, &mut rng)?;
    let counts: Vec<usize> = chain.events.iter().map(|e| e.blocks_after).collect();
    println!("chain from 10: {counts:?}");

    let n = 8;
    let law = exact_j_distribution(n)?;
    println!("exact P(J_{n} = j): {:?}", &law.probs[1..]);
    for engine in [CutEngine::Cutting, CutEngine::Clocks, CutEngine::Chain, CutEngine::Records] {
        let rep = cut_count_experiment(n, 100_000, 5, engine)?;
        let t = &rep.test_statistics["chi2_exact_law"];
        println!(
            "{:8} mean {:.4} (exact {:.4})  chi2 {:.2} on {} df: {}",
            engine.name(),
            rep.estimates["mean"],
            rep.estimates["exact_mean"],
            t.statistic,
            t.df.unwrap_or(0),
            if t.pass { "pass" } else { "fail" }
        );
    }
    Ok(())
}
