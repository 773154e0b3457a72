//! Random recursive trees: sampling, enumeration, and the bijection with
//! permutations.
//!
//! cargo run --example rrt_basics

use bscoal::rng::RngStream;
use bscoal::rrt::{enumerate_rrts, generate_rrt, shape_index, tree_to_permutation};

fn main() -> bscoal::error::Result<()> {
    let mut rng = RngStream::new(1, 0);
    let t = generate_rrt(8, &mut rng)?;
    println!("parents of a tree on 8 vertices: {:?}", t.parents());
    println!("subtree sizes: {:?}", t.subtree_sizes());

    let p = tree_to_permutation(&t)?;
    println!("as a permutation: {:?}", p.cycles());
    println!("cycle type: {:?}", p.cycle_type());

    // every recursive tree on 4 vertices, with the frequency of each shape
    let all = enumerate_rrts(4)?;
    let mut counts = vec![0u32; all.len()];
    for _ in 0..60_000 {
        counts[shape_index(generate_rrt(4, &mut rng)?.parents())] += 1;
    }
    for (tree, c) in all.iter().zip(&counts) {
        println!("{:?}  {c}", tree.parents());
    }
    Ok(())
}
