//! Statistical agreement between the simulators and their exact laws.

use std::collections::HashMap;

use bscoal::coalescent::{sample_last_collision, simulate_chain, RrtCoalescent};
use bscoal::cutting::marked_tree_partition;
use bscoal::rng::RngStream;
use bscoal::rrt::{generate_crp, generate_rrt, tree_to_permutation};
use bscoal::stats::{
    chi_square_two_sample, chi_square_uniformity, cut_closure_experiment, cut_count_experiment,
    histogram, merge_sparse_pairs, rrt_uniformity_experiment, run_samples, CutEngine, MIN_EXPECTED,
};

#[test]
fn both_engines_match_the_exact_collision_law() {
    for n in 2..=8 {
        for engine in [CutEngine::Chain, CutEngine::Clocks] {
            let rep = cut_count_experiment(n, 100_000, 17, engine).unwrap();
            if n == 2 {
                // J_2 = 1 surely: a single cell, only the mean is tested
                assert_eq!(rep.estimates["mean"], 1.0);
                continue;
            }
            assert!(rep.pass, "n = {n}, {}: {:?}", engine.name(), rep.test_statistics);
        }
    }
}

#[test]
fn uniform_trees_for_small_n() {
    for n in 3..=5 {
        let rep = rrt_uniformity_experiment(n, 100_000, 3).unwrap();
        assert!(rep.pass, "n = {n}: {:?}", rep.test_statistics);
    }
}

#[test]
fn cut_closure_for_small_n() {
    // with 3 vertices a cut leaves at most 2, which have a single shape
    for n in 4..=5 {
        let rep = cut_closure_experiment(n, 100_000, 4).unwrap();
        assert!(rep.pass, "n = {n}: {:?}", rep.test_statistics);
    }
}

#[test]
fn trees_give_uniform_permutations() {
    let perms = run_samples(5, &[1], 100_000, |r| {
        let t = generate_rrt(4, r)?;
        tree_to_permutation(&t).map(|p| p.image().to_vec())
    })
    .unwrap();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut counts = vec![0u64; 6];
    for p in perms {
        let k = index.len();
        let i = *index.entry(p).or_insert(k);
        counts[i] += 1;
    }
    assert_eq!(index.len(), 6);
    assert!(chi_square_uniformity(&counts, &[1.0 / 6.0; 6]).unwrap().pass);
}

#[test]
fn restaurant_cycle_types_follow_cauchy() {
    // n = 5: permutations by cycle type, Cauchy's formula n!/prod(m^{c_m} c_m!)
    let types: [(&[usize], f64); 7] = [
        (&[1, 1, 1, 1, 1], 1.0),
        (&[2, 1, 1, 1], 10.0),
        (&[2, 2, 1], 15.0),
        (&[3, 1, 1], 20.0),
        (&[3, 2], 20.0),
        (&[4, 1], 30.0),
        (&[5], 24.0),
    ];
    let sizes = run_samples(6, &[2], 100_000, |r| {
        let p = generate_crp(5, 0.0, 1.0, r)?;
        let mut s: Vec<usize> = p.blocks().iter().map(|b| b.weight()).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        Ok(s)
    })
    .unwrap();
    let mut counts = vec![0u64; types.len()];
    for s in &sizes {
        let i = types.iter().position(|(t, _)| *t == s.as_slice()).expect("a partition of 5");
        counts[i] += 1;
    }
    let probs: Vec<f64> = types.iter().map(|(_, c)| c / 120.0).collect();
    assert!(chi_square_uniformity(&counts, &probs).unwrap().pass, "{counts:?}");
}

#[test]
fn event_logs_balance_mass() {
    let mut rng = RngStream::new(8, 0);
    for n in [1, 2, 3, 10, 500] {
        for _ in 0..20 {
            let chain = simulate_chain(n, &mut rng).unwrap();
            chain.check().unwrap();
            let merged: usize = chain.events.iter().map(|e| e.merged - 1).sum();
            assert_eq!(merged, n - 1);
            if n >= 2 {
                let run = RrtCoalescent::sample(n, &mut rng).unwrap().replay(false);
                run.log.check().unwrap();
                let merged: usize = run.log.events.iter().map(|e| e.merged - 1).sum();
                assert_eq!(merged, n - 1);
            }
        }
    }
}

#[test]
fn fast_sampler_matches_full_tree_engine() {
    let n = 300;
    let samples = 40_000;
    let fast = run_samples(9, &[1], samples, |r| sample_last_collision(n, r)).unwrap();
    let tree = run_samples(9, &[2], samples, |r| RrtCoalescent::sample(n, r)?.last_collision(false)).unwrap();
    let bucket = |m: usize| (usize::BITS - m.leading_zeros()) as usize;
    let cells = 12;
    let test = |f: &dyn Fn(&bscoal::coalescent::LastCollision) -> usize| {
        let a = histogram(fast.iter().map(f), cells);
        let b = histogram(tree.iter().map(f), cells);
        let (a, b) = merge_sparse_pairs(&a, &b, MIN_EXPECTED);
        chi_square_two_sample(&a, &b).unwrap()
    };
    let mass = test(&|d| bucket(d.mass));
    let blocks = test(&|d| d.blocks);
    let time = test(&|d| ((d.absorption_time * 2.0) as usize).min(cells - 1));
    assert!(mass.pass && blocks.pass && time.pass, "{mass:?} {blocks:?} {time:?}");
}

#[test]
fn marked_tree_restricts_pathwise() {
    for seed in 0..50 {
        for t in [0.3, 1.0, 2.5] {
            let big = marked_tree_partition(80, t, &mut RngStream::new(seed, 7)).unwrap();
            let small = marked_tree_partition(50, t, &mut RngStream::new(seed, 7)).unwrap();
            assert_eq!(big.restrict(50), small);
        }
    }
}
