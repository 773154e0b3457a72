//! Marked recursive trees against Chinese restaurant processes, and the
//! size of the block of 1.
//!
//! cargo run --release --example marked_tree_crp

use bscoal::cutting::marked_tree_partition;
use bscoal::rng::RngStream;
use bscoal::rrt::generate_crp;
use bscoal::stats::{block_of_one_experiment, gem_first_frequency_experiment, marked_tree_experiment};

fn main() -> bscoal::error::Result<()> {
    let mut rng = RngStream::new(4, 0);
    println!("marked tree, n = 12, t = 1: {}", marked_tree_partition(12, 1.0, &mut rng)?);
    println!("CRP(e^-1, 0), n = 12:       {}", generate_crp(12, (-1f64).exp(), 0.0, &mut rng)?);

    let rep = marked_tree_experiment(500, 1.0, 20_000, 1)?;
    println!(
        "mean block count: tree {:.3}, restaurant {:.3}; chi2 {}",
        rep.estimates["tree_mean_blocks"],
        rep.estimates["crp_mean_blocks"],
        if rep.pass { "pass" } else { "fail" }
    );

    for t in [0.25, std::f64::consts::LN_2, 2.0] {
        let b = block_of_one_experiment(10_000, t, 5_000, 2)?;
        // at finite n the frequency has atoms at 1/n and at 1
        let atom = |x: f64| b.raw.rows.iter().filter(|r| r[0] == x).count() as f64 / b.samples as f64;
        println!(
            "t = {t:.3}: block of 1 mean {:.4} (limit {:.4}), K-S to Beta {:.4}, P(= 1/n) {:.3}, P(= 1) {:.3}",
            b.estimates["mean"],
            b.estimates["limit_mean"],
            b.test_statistics["ks_beta"].statistic,
            atom(1e-4),
            atom(1.0)
        );
    }
    let g = gem_first_frequency_experiment(10_000, 10_000, 3)?;
    println!("first block of CRP(0, 1): K-S to U[0,1] {:.4}", g.test_statistics["ks_uniform"].statistic);
    Ok(())
}
