//! Structural invariants over random inputs.

use bscoal::coalescent::{forward_prob_f64, RrtCoalescent, Rates};
use bscoal::cutting::{count_records, cut_edge, cuts_to_isolate_root, marked_partition_from, EdgeWeights};
use bscoal::exact::{x_table_f64, Fixed};
use bscoal::rng::{derive_seed, RngStream};
use bscoal::rrt::{generate_crp, generate_rrt, tree_to_permutation, Permutation, Tree};
use bscoal::stats::{ks_statistic, merge_sparse_cells, uniform_cdf, EmpiricalDistribution};
use proptest::prelude::*;

fn rrt(n: usize, seed: u64) -> Tree {
    generate_rrt(n, &mut RngStream::new(seed, 0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_trees_are_recursive(n in 1usize..200, seed in any::<u64>()) {
        let t = rrt(n, seed);
        prop_assert_eq!(t.len(), n);
        for v in 1..n {
            prop_assert!(t.parents()[v] < v);
        }
        prop_assert_eq!(t.subtree_sizes()[0], n);
    }

    #[test]
    fn prefixes_are_consistent(n in 2usize..100, seed in any::<u64>()) {
        let big = rrt(n, seed);
        let small = rrt(n - 1, seed);
        prop_assert_eq!(&big.parents()[..n - 1], small.parents());
    }

    #[test]
    fn cuts_conserve_labels(n in 2usize..40, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 1);
        let mut t = rrt(n, seed);
        while t.len() > 1 {
            let v = 1 + rng.below(t.len() - 1);
            let before = t.len();
            let cut = cut_edge(&t, v).unwrap();
            t = cut.tree;
            prop_assert_eq!(t.len() + cut.removed_count, before);
            let mut all: Vec<usize> = t.labels().iter().flat_map(|b| b.elements().to_vec()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (1..=n).collect::<Vec<_>>());
            // least labels increase along root paths
            for u in 1..t.len() {
                prop_assert!(t.label(t.parents()[u]).least() < t.label(u).least());
            }
        }
    }

    #[test]
    fn cut_and_record_counts_are_in_range(n in 2usize..300, seed in any::<u64>()) {
        let t = rrt(n, seed);
        let mut rng = RngStream::new(seed, 2);
        let cuts = cuts_to_isolate_root(&t, &mut rng);
        let root_children = t.parents().iter().skip(1).filter(|&&p| p == 0).count();
        prop_assert!(cuts >= root_children && cuts < n);
        let w = EdgeWeights::uniform(n, &mut rng);
        let records = count_records(&t, &w).unwrap();
        prop_assert!(records >= root_children && records < n);
    }

    #[test]
    fn permutations_round_trip_through_cycles(n in 1usize..60, seed in any::<u64>()) {
        // a tree on n + 1 vertices gives a permutation of [n]
        let p = tree_to_permutation(&rrt(n + 1, seed)).unwrap();
        prop_assert_eq!(p.image().len(), n);
        let back = Permutation::from_cycles(n, &p.cycles()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), n);
    }

    #[test]
    fn inversion_stays_in_range_and_is_monotone(b in 2usize..10_000, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let r = Rates::new(b).unwrap();
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        let (a, c) = (r.invert(lo), r.invert(hi));
        prop_assert!((2..=b).contains(&a) && (2..=b).contains(&c));
        prop_assert!(a <= c);
    }

    #[test]
    fn forward_rows_sum_to_one(b in 2usize..3000) {
        let s: f64 = (2..=b).map(|k| forward_prob_f64(b, k)).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn replay_coarsens_and_ends_in_one_block(n in 2usize..120, seed in any::<u64>()) {
        let c = RrtCoalescent::sample(n, &mut RngStream::new(seed, 3)).unwrap();
        let run = c.replay(true);
        run.log.check().unwrap();
        let parts = run.partitions.unwrap();
        prop_assert_eq!(parts.len(), run.log.events.len());
        for (w, e) in parts.windows(2).zip(run.log.events.iter().skip(1)) {
            prop_assert_eq!(w[1].len(), e.blocks_after);
            // every block of the earlier partition sits inside one later block
            for b in w[0].blocks() {
                let target = w[1].block_of(b.least()).unwrap();
                prop_assert!(b.elements().iter().all(|&x| w[1].block_of(x) == Some(target)));
            }
        }
        prop_assert_eq!(parts.last().unwrap().len(), 1);
        let last = c.last_collision(true).unwrap();
        prop_assert_eq!(last.collisions, Some(run.log.collision_count()));
        prop_assert_eq!(last.absorption_time, run.log.final_time());
    }

    #[test]
    fn marked_partition_extremes(n in 1usize..80, seed in any::<u64>()) {
        let c = RrtCoalescent::sample(n.max(2), &mut RngStream::new(seed, 4)).unwrap();
        let zero = marked_partition_from(c.parents(), c.clocks(), 0.0).unwrap();
        prop_assert_eq!(zero.len(), c.n());
        let late = marked_partition_from(c.parents(), c.clocks(), f64::MAX).unwrap();
        prop_assert_eq!(late.len(), 1);
    }

    #[test]
    fn restaurant_partitions_cover_the_ground_set(n in 1usize..200, seed in any::<u64>(), alpha in 0.0f64..0.99, theta in 0.0f64..5.0) {
        let p = generate_crp(n, alpha, theta, &mut RngStream::new(seed, 5)).unwrap();
        prop_assert_eq!(p.blocks().iter().map(|b| b.weight()).sum::<usize>(), n);
        for w in p.blocks().windows(2) {
            prop_assert!(w[0].least() < w[1].least());
        }
    }

    #[test]
    fn ecdf_and_ks_are_well_behaved(xs in prop::collection::vec(0.0f64..1.0, 1..300)) {
        let e = EmpiricalDistribution::new(xs.clone()).unwrap();
        let mut last = 0.0;
        for x in [-1.0, 0.1, 0.3, 0.5, 0.9, 2.0] {
            let f = e.ecdf(x);
            prop_assert!(f >= last);
            last = f;
        }
        prop_assert_eq!(e.ecdf(2.0), 1.0);
        let d = ks_statistic(&e, uniform_cdf).unwrap();
        prop_assert!(d > 0.0 && d <= 1.0);
        prop_assert!(d >= 0.5 / xs.len() as f64);
    }

    #[test]
    fn merging_cells_keeps_totals(counts in prop::collection::vec(0u64..50, 2..40)) {
        let k = counts.len();
        let probs = vec![1.0 / k as f64; k];
        let (c, p) = merge_sparse_cells(&counts, &probs, 5.0);
        prop_assert_eq!(c.iter().sum::<u64>(), counts.iter().sum::<u64>());
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_tracks_f64(a in -1e6f64..1e6, b in 0.5f64..1e3) {
        let (x, y) = (Fixed::from_f64(a, 200), Fixed::from_f64(b, 200));
        prop_assert!((x.add(&y).to_f64() - (a + b)).abs() <= 1e-9 * (a.abs() + b));
        prop_assert!((x.mul(&y).to_f64() - a * b).abs() <= 1e-12 * (a * b).abs().max(1.0));
        prop_assert!((x.div(&y).to_f64() - a / b).abs() <= 1e-12 * (a / b).abs().max(1.0));
    }

    #[test]
    fn seeds_replay(seed in any::<u64>(), w in any::<u64>()) {
        let s = derive_seed(seed, &[w]);
        let mut a = RngStream::new(s, 9);
        let mut b = RngStream::new(s, 9);
        prop_assert_eq!(a.uniform(), b.uniform());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn x_tables_obey_the_increment_bound(m in 2usize..=10, n_max in 20usize..5_000) {
        let t = x_table_f64(m, n_max).unwrap();
        prop_assert!(t.within_unit_interval());
        prop_assert!(t.increment_bound_ratio() <= 1.0 + 1e-12);
    }
}
