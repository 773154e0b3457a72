//! Hitting probabilities of the block-counting chain seen backwards from
//! absorption: finite-n tables, their limits, and a simulation.
//!
//! cargo run --release --example reversed_chain

use bscoal::exact::recurrence::y_tables_f64;
use bscoal::exact::{integral_oracle, x_table, x_table_exact, x_table_f64, AltSumTable};
use bscoal::stats::reversed_chain_experiment;

fn main() -> bscoal::error::Result<()> {
    let exact = x_table_exact(2, 6)?;
    for (n, v) in exact.rows() {
        println!("x_{n}^(2) = {v}");
    }
    let hp = x_table(2, 2_000, 25)?;
    println!("x_2000^(2) = {}", hp.get(2_000).expect("in range").to_decimal(25));
    let fast = x_table_f64(2, 1_000_000)?;
    for n in [100, 10_000, 1_000_000] {
        let x = fast.get(n).expect("in range");
        println!("x_{n}^(2) = {x:.10}  gap to log 2 = {:.3e}", x - std::f64::consts::LN_2);
    }

    let (enter, hit) = y_tables_f64(3, 5, 1_000)?;
    println!("P(visit 3 from 1000) = {:.6}", hit.get(1_000).expect("in range"));
    println!("P(enter 3 from 5 | visit 3) = {:.6}", enter.get(1_000).expect("in range") / hit.get(1_000).expect("in range"));

    let table = AltSumTable::new(200, 30)?;
    for m in [2, 3, 10, 100] {
        let p = table.hat_p(1, m)?;
        println!(
            "limit enter 1 from {m}: {} ({} digits); quadrature {:.15}",
            p.to_decimal_certified(),
            p.certified_digits(),
            integral_oracle(m)?.to_f64()
        );
    }

    let rep = reversed_chain_experiment(1_000, 1, 6, 100_000, 9)?;
    for m in 2..=6 {
        let k = format!("enter_from_{m}");
        println!("m = {m}: simulated {:.5}, exact {:.5}", rep.estimates[&k], rep.estimates[&format!("{k}_exact")]);
    }
    Ok(())
}
