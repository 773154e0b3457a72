//! Cutting a recursive tree down to its root, with and without label
//! bookkeeping, and the record count of i.i.d. edge weights.
//!
//! cargo run --example cutting_procedure

use bscoal::cutting::{count_records, cut_edge, cuts_to_isolate_root, EdgeWeights};
use bscoal::rng::RngStream;
use bscoal::rrt::{generate_rrt, Tree};

fn show(t: &Tree) -> String {
    let labels: Vec<String> = t.labels().iter().map(|b| b.to_string()).collect();
    format!("parents {:?} labels {}", t.parents(), labels.join(" "))
}

fn main() -> bscoal::error::Result<()> {
    let mut rng = RngStream::new(3, 0);
    let mut t = generate_rrt(7, &mut rng)?;
    println!("start: {}", show(&t));
    while t.len() > 1 {
        let v = 1 + rng.below(t.len() - 1);
        let cut = cut_edge(&t, v)?;
        println!(
            "cut above vertex {v}: {} vertices removed, {} absorbs them",
            cut.removed_count, cut.merged_into
        );
        t = cut.tree;
        println!("  {}", show(&t));
    }

    let big = generate_rrt(100_000, &mut rng)?;
    let cuts = cuts_to_isolate_root(&big, &mut rng);
    let w = EdgeWeights::uniform(big.len(), &mut rng);
    let records = count_records(&big, &w)?;
    let scale = (big.len() as f64).ln() / big.len() as f64;
    println!("n = 100000: {cuts} cuts ({:.3} scaled), {records} records ({:.3} scaled)", cuts as f64 * scale, records as f64 * scale);
    Ok(())
}
