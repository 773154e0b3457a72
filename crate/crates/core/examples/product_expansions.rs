//! Infinite products for `e^{1/r}` built from the alternating log sums.
//!
//! cargo run --release --example product_expansions

use bscoal::exact::{inner_product_exact, product_partial_from, stable_alt_sum, AltSumTable};

fn main() -> bscoal::error::Result<()> {
    for n in 1..=5 {
        println!("inner product {n}: {}", inner_product_exact(n)?);
    }
    // two independent routes to s_500
    let direct = stable_alt_sum(500, 30)?;
    let table = AltSumTable::new(10_000, 20)?;
    println!("s_500 direct {}  triangle {}", direct.to_decimal_certified(), table.s(500).to_decimal_certified());

    for r in 1..=3 {
        for terms in [r, 100, 10_000] {
            let p = product_partial_from(&table, r, terms, 20)?;
            println!(
                "r = {r}, N = {terms:5}: exponent {}  product {}  gap {:.2e}",
                p.exponent.to_decimal_certified(),
                p.product.to_decimal_certified(),
                (p.exponent.to_f64() - 1.0 / r as f64).abs()
            );
        }
    }
    Ok(())
}
