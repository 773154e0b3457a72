//! The last collision at large `n`: the mass outside the block of 1, the
//! number of merging blocks, and the absorption time.
//!
//! cargo run --release --example last_collision [n] [samples]

use bscoal::coalescent::RrtCoalescent;
use bscoal::rng::RngStream;
use bscoal::stats::{absorption_experiment, b_minus_one_reference, last_collision_experiment};

fn main() -> bscoal::error::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(1_000_000);
    let samples = args.next().unwrap_or(10_000);

    // the full tree engine on one sample, for comparison with the sampler
    let c = RrtCoalescent::sample(10_000, &mut RngStream::new(2, 0))?;
    println!("one tree on 10^4 vertices: {:?}", c.last_collision(true)?);

    let rep = last_collision_experiment(n, samples, 42)?;
    println!("n = {n}, {samples} samples");
    for (k, v) in &rep.estimates {
        println!("  {k} = {v:.5}");
    }
    for (k, t) in &rep.test_statistics {
        println!("  {k}: {:.5} vs {:.5} {}", t.statistic, t.threshold, if t.pass { "pass" } else { "fail" });
    }
    for note in &rep.notes {
        println!("  note: {note}");
    }
    let p = b_minus_one_reference()?;
    println!("limit P(B - 1 = m), m = 1..5: {:?}", &p[..5]);

    let a = absorption_experiment(n, samples, 42)?;
    println!("A_n - log log n: mean {:.4}, K-S to Gumbel {:.4}", a.estimates["mean_centred"], a.test_statistics["ks_gumbel"].statistic);
    Ok(())
}
