//! Exact laws: merger rates, the law and mean of the collision count, and
//! the consistency of Lambda-coalescent rates.
//!
//! cargo run --release --example exact_tables

use bscoal::coalescent::{forward_prob, lambda, Rates};
use bscoal::exact::{
    exact_j_distribution, exact_j_distribution_rational, exact_j_mean, lambda_consistency_check,
    LambdaRates,
};

fn main() -> bscoal::error::Result<()> {
    for k in 2..=5 {
        println!("lambda(5, {k}) = {}   p(5, {k}) = {}", lambda(5, k)?, forward_prob(5, k)?);
    }
    println!("inversion at b = 5: u = 0.1 -> k = {}, u = 0.9 -> k = {}", Rates::new(5)?.invert(0.1), Rates::new(5)?.invert(0.9));

    let r = exact_j_distribution_rational(6)?;
    println!("P(J_6 = j): {}", r.iter().skip(1).map(|p| p.to_string()).collect::<Vec<_>>().join(", "));

    for n in [100, 1_000, 10_000] {
        let d = exact_j_distribution(n)?;
        let mean = exact_j_mean(n)?;
        let ln = (n as f64).ln();
        println!(
            "n = {n}: E J = {mean:.4} (law {:.4}), scaled {:.4}, expansion {:.4}",
            d.mean(),
            mean * ln / n as f64,
            1.0 + (2.0 - 0.577_215_664_901_532_9) / ln
        );
    }

    let bs = LambdaRates::bolthausen_sznitman();
    println!("consistent: bs {}, kingman {}", lambda_consistency_check(&bs, 100)?, lambda_consistency_check(&LambdaRates::kingman(), 100)?);
    let bad = bs.perturbed(7, 3, 1e-3);
    println!("perturbed a(7,3): consistent {}", lambda_consistency_check(&bad, 20)?);
    Ok(())
}
