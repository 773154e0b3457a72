//! The Bolthausen–Sznitman coalescent restricted to `[n]`.
//!
//! Two engines: [`simulate_chain`] runs the block-counting chain directly from
//! its rates, and [`RrtCoalescent`] replays the cutting of a random recursive
//! tree whose edges carry independent Exp(1) clocks. [`sample_last_collision`]
//! draws the last-collision observables without building the tree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cutting::{marked_partition_from, tree_with_clocks, Children};
use crate::error::{domain, Result};
use crate::rng::RngStream;
use crate::rrt::{subtree_sizes, Partition, Tree};

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn check_bk(b: usize, k: usize) -> Result<()> {
    if k < 2 || k > b {
        return domain(format!("need 2 <= k <= b, got b = {b}, k = {k}"));
    }
    Ok(())
}

/// Rate at which any particular `k` of `b` blocks merge:
/// `(k-2)! (b-k)! / (b-1)!`.
pub fn lambda(b: usize, k: usize) -> Result<BigRational> {
    check_bk(b, k)?;
    Ok(BigRational::new(
        factorial(k - 2) * factorial(b - k),
        factorial(b - 1),
    ))
}

/// Probability that the next event of the block-counting chain from `b`
/// merges `k` blocks, i.e. jumps to `b - k + 1`: `b / ((b-1) k (k-1))`.
pub fn forward_prob(b: usize, k: usize) -> Result<BigRational> {
    check_bk(b, k)?;
    Ok(BigRational::new(
        BigInt::from(b),
        BigInt::from((b - 1) * k * (k - 1)),
    ))
}

pub fn forward_prob_f64(b: usize, k: usize) -> f64 {
    let (b, k) = (b as f64, k as f64);
    b / ((b - 1.0) * k * (k - 1.0))
}

/// `sum_k C(b,k) lambda(b,k)`; equals `b - 1`.
pub fn total_rate_exact(b: usize) -> Result<BigRational> {
    if b < 2 {
        return domain("total rate needs b >= 2");
    }
    let mut sum = BigRational::zero();
    let mut binom = BigInt::from(b); // C(b,1)
    for k in 2..=b {
        binom = binom * BigInt::from(b - k + 1) / BigInt::from(k);
        sum += BigRational::from_integer(binom.clone()) * lambda(b, k)?;
    }
    Ok(sum)
}

/// `sum_k forward_prob(b,k)`; equals 1.
pub fn forward_row_sum(b: usize) -> Result<BigRational> {
    if b < 2 {
        return domain("row sum needs b >= 2");
    }
    let mut sum = BigRational::zero();
    for k in 2..=b {
        sum += forward_prob(b, k)?;
    }
    Ok(sum)
}

/// Rates seen from a state with `b` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rates {
    pub b: usize,
}

impl Rates {
    pub fn new(b: usize) -> Result<Self> {
        if b < 2 {
            return domain("rates need at least two blocks");
        }
        Ok(Self { b })
    }

    pub fn lambda(&self, k: usize) -> Result<BigRational> {
        lambda(self.b, k)
    }

    pub fn forward_prob(&self, k: usize) -> Result<BigRational> {
        forward_prob(self.b, k)
    }

    pub fn total_rate(&self) -> usize {
        self.b - 1
    }

    /// Number of merging blocks by inversion of the telescoping CDF
    /// `F(K) = b/(b-1) (1 - 1/K)`.
    pub fn invert(&self, u: f64) -> usize {
        let b = self.b as f64;
        let k = (b / (b - u * (b - 1.0))).ceil();
        (k as usize).clamp(2, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    /// Number of blocks that merged.
    pub merged: usize,
    pub blocks_after: usize,
}

/// Collision history of the coalescent on `[n]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EventLog {
    pub n: usize,
    pub events: Vec<Event>,
}

impl EventLog {
    /// Absorption time `A_n`; zero when `n = 1`.
    pub fn final_time(&self) -> f64 {
        self.events.last().map_or(0.0, |e| e.time)
    }

    /// Number of collisions `J_n`.
    pub fn collision_count(&self) -> usize {
        self.events.len()
    }

    pub fn last(&self) -> Option<&Event> {
        self.events.last()
    }

    pub fn check(&self) -> Result<()> {
        let mut b = self.n;
        let mut t = 0.0;
        for e in &self.events {
            if !(e.time > t) {
                return domain("event times must increase strictly");
            }
            if e.merged < 2 || e.merged > b || e.blocks_after != b - e.merged + 1 {
                return domain("inconsistent block counts");
            }
            t = e.time;
            b = e.blocks_after;
        }
        if self.n >= 1 && b != 1 {
            return domain("the log must end with a single block");
        }
        Ok(())
    }
}

/// Observables of the final collision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LastCollision {
    /// Total size of the blocks not containing 1.
    pub mass: usize,
    /// Number of blocks merging.
    pub blocks: usize,
    pub absorption_time: f64,
    /// Number of collisions, when it was computed.
    pub collisions: Option<usize>,
}

/// Block-counting chain with holding times Exp(b-1).
pub fn simulate_chain(n: usize, rng: &mut RngStream) -> Result<EventLog> {
    if n == 0 {
        return domain("simulate_chain needs n >= 1");
    }
    let mut log = EventLog {
        n,
        events: Vec::new(),
    };
    let mut b = n;
    let mut t = 0.0;
    while b > 1 {
        t += rng.exp1() / (b - 1) as f64;
        let k = Rates { b }.invert(rng.uniform());
        b -= k - 1;
        log.events.push(Event {
            time: t,
            merged: k,
            blocks_after: b,
        });
    }
    Ok(log)
}

/// Number of collisions of the block-counting chain started from `n`.
pub fn chain_collision_count(n: usize, rng: &mut RngStream) -> usize {
    let mut b = n;
    let mut j = 0;
    while b > 1 {
        b -= Rates { b }.invert(rng.uniform()) - 1;
        j += 1;
    }
    j
}

/// A recursive tree on `n` vertices with a clock on every non-root edge:
/// the input of the cutting engine. `clocks[0]` is `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct RrtCoalescent {
    parent: Vec<usize>,
    clock: Vec<f64>,
}

/// Output of a replay.
#[derive(Clone, Debug, PartialEq)]
pub struct RrtRun {
    pub log: EventLog,
    /// Vertex cut at each event.
    pub cuts: Vec<usize>,
    /// Partition after each event, when tracked.
    pub partitions: Option<Vec<Partition>>,
}

impl RrtCoalescent {
    /// Uniform tree with i.i.d. Exp(1) clocks; the parent and clock of vertex
    /// `v` are drawn together, so samples for `n` and `n + 1` on one stream
    /// share their first `n` vertices.
    pub fn sample(n: usize, rng: &mut RngStream) -> Result<Self> {
        if n == 0 {
            return domain("the coalescent needs n >= 1");
        }
        let (parent, clock) = tree_with_clocks(n, rng);
        Ok(Self { parent, clock })
    }

    /// Clocks must be positive and finite off the root; `clocks[0]` is ignored.
    pub fn from_parts(parent: Vec<usize>, mut clock: Vec<f64>) -> Result<Self> {
        let tree = Tree::with_singletons(parent)?;
        if clock.len() != tree.len() {
            return domain("one clock per vertex required");
        }
        clock[0] = f64::INFINITY;
        if clock[1..].iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return domain("clocks must be positive and finite");
        }
        Ok(Self {
            parent: tree.parents().to_vec(),
            clock,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn clocks(&self) -> &[f64] {
        &self.clock
    }

    pub fn tree(&self) -> Tree {
        Tree::with_singletons(self.parent.clone()).expect("parents are recursive")
    }

    /// Cuts edges in increasing clock order, skipping vertices that already
    /// left with an ancestor. `O(n log n)` for a uniform tree.
    pub fn replay(&self, track_partitions: bool) -> RrtRun {
        let n = self.n();
        let mut order: Vec<usize> = (1..n).collect();
        order.sort_unstable_by(|&a, &b| self.clock[a].total_cmp(&self.clock[b]));
        let children = Children::new(&self.parent);
        let mut present = vec![true; n];
        let mut count: Vec<usize> = subtree_sizes(&self.parent);
        let mut log = EventLog {
            n,
            events: Vec::new(),
        };
        let mut cuts = Vec::new();
        let mut partitions = track_partitions.then(Vec::new);
        let mut blocks = n;
        let mut stack = Vec::new();
        for v in order {
            if !present[v] {
                continue;
            }
            let c = count[v];
            let mut a = self.parent[v];
            loop {
                count[a] -= c;
                if a == 0 {
                    break;
                }
                a = self.parent[a];
            }
            stack.push(v);
            while let Some(u) = stack.pop() {
                present[u] = false;
                stack.extend(children.of(u).iter().copied().filter(|&w| present[w]));
            }
            blocks -= c;
            let time = self.clock[v];
            log.events.push(Event {
                time,
                merged: c + 1,
                blocks_after: blocks,
            });
            cuts.push(v);
            if let Some(p) = partitions.as_mut() {
                p.push(self.partition_at(time));
            }
        }
        RrtRun {
            log,
            cuts,
            partitions,
        }
    }

    /// Partition at time `t`: every edge with clock at most `t` has been cut.
    pub fn partition_at(&self, t: f64) -> Partition {
        marked_partition_from(&self.parent, &self.clock, t.next_up())
            .expect("clock and parent lengths agree")
    }

    /// Size of the block containing 1 at time `t`.
    pub fn block_of_one_size_at(&self, t: f64) -> usize {
        let sizes = subtree_sizes(&self.parent);
        1 + (1..self.n())
            .filter(|&v| self.parent[v] == 0 && self.clock[v] <= t)
            .map(|v| sizes[v])
            .sum::<usize>()
    }

    /// Last-collision observables read off the tree in one pass: the last cut
    /// is the root child with the largest clock.
    pub fn last_collision(&self, with_count: bool) -> Result<LastCollision> {
        let n = self.n();
        if n < 2 {
            return domain("a last collision needs n >= 2");
        }
        let star = (1..n)
            .filter(|&v| self.parent[v] == 0)
            .max_by(|&a, &b| self.clock[a].total_cmp(&self.clock[b]))
            .expect("vertex 1 is a root child");
        let a = self.clock[star];
        // inside[u]: u lies below star; alive[u]: no clock below a on the
        // path from u up to star
        let mut inside = vec![false; n];
        let mut alive = vec![false; n];
        inside[star] = true;
        alive[star] = true;
        let (mut mass, mut blocks) = (1, 2);
        for u in star + 1..n {
            let p = self.parent[u];
            if inside[p] {
                inside[u] = true;
                mass += 1;
                if alive[p] && self.clock[u] > a {
                    alive[u] = true;
                    blocks += 1;
                }
            }
        }
        let collisions = with_count.then(|| self.replay(false).log.collision_count());
        Ok(LastCollision {
            mass,
            blocks,
            absorption_time: a,
            collisions,
        })
    }
}

/// Samples a tree with clocks and replays it, recording the partition after
/// every collision.
pub fn simulate_rrt_coalescent(n: usize, rng: &mut RngStream) -> Result<RrtRun> {
    Ok(RrtCoalescent::sample(n, rng)?.replay(true))
}

/// Draws `(M_n, B_n, A_n)` without building the tree.
///
/// The subtree sizes of the root's children follow discrete stick-breaking:
/// the first child's subtree is uniform on `1..=n-1` and the rest of the tree
/// is again uniform recursive. Each root child gets an Exp(1) clock; the
/// largest one is `A_n` and its subtree holds the mass `M_n`. Within that
/// subtree, itself uniform recursive on `M_n` vertices with clocks independent
/// of `A_n`, the vertices still attached at time `A_n` form the root cluster
/// of a percolation keeping each edge with probability `e^{-A_n}`; it is
/// grown one vertex at a time.
pub fn sample_last_collision(n: usize, rng: &mut RngStream) -> Result<LastCollision> {
    if n < 2 {
        return domain("sample_last_collision needs n >= 2");
    }
    let mut rem = n - 1;
    let (mut best_clock, mut best_size) = (f64::NEG_INFINITY, 0);
    while rem > 0 {
        let s = 1 + rng.below(rem);
        let c = rng.exp1();
        if c > best_clock {
            best_clock = c;
            best_size = s;
        }
        rem -= s;
    }
    let keep = (-best_clock).exp();
    let mut cluster = 1.0;
    for k in 1..best_size {
        if rng.uniform() * (k as f64) < cluster * keep {
            cluster += 1.0;
        }
    }
    Ok(LastCollision {
        mass: best_size,
        blocks: 1 + cluster as usize,
        absorption_time: best_clock,
        collisions: None,
    })
}

/// Fraction of `[n]` in the block of 1 at time `t`, from a fresh tree.
pub fn block_of_one_frequency(n: usize, t: f64, rng: &mut RngStream) -> Result<f64> {
    if !(t >= 0.0) {
        return domain("time must be nonnegative");
    }
    let c = RrtCoalescent::sample(n, rng)?;
    Ok(c.block_of_one_size_at(t) as f64 / n as f64)
}

/// Builds the coupled samples on `[n]` and `[n+1]` from one stream and checks
/// that restricting the larger partition to `[n]` gives the smaller one at
/// every event time of either run.
pub fn restriction_check(n: usize, rng: &mut RngStream) -> Result<bool> {
    if n < 2 {
        return domain("restriction_check needs n >= 2");
    }
    let big = RrtCoalescent::sample(n + 1, &mut rng.clone())?;
    let small = RrtCoalescent::sample(n, rng)?;
    let mut times: Vec<f64> = big
        .replay(false)
        .log
        .events
        .iter()
        .chain(small.replay(false).log.events.iter())
        .map(|e| e.time)
        .collect();
    times.push(0.0);
    times.sort_unstable_by(f64::total_cmp);
    Ok(times
        .iter()
        .all(|&t| big.partition_at(t).restrict(n) == small.partition_at(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(i: u64) -> RngStream {
        RngStream::new(31, i)
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rate_values() {
        assert_eq!(lambda(2, 2).unwrap(), r(1, 1));
        assert_eq!(lambda(3, 2).unwrap(), r(1, 2));
        for b in 2..=10 {
            assert_eq!(lambda(b, b).unwrap(), r(1, b as i64 - 1));
        }
        assert!(lambda(3, 1).is_err());
        assert!(lambda(3, 4).is_err());
        assert_eq!(forward_prob(2, 2).unwrap(), r(1, 1));
        assert_eq!(forward_prob(3, 2).unwrap(), r(3, 4));
        assert_eq!(forward_prob(3, 3).unwrap(), r(1, 4));
    }

    #[test]
    fn rate_rows() {
        for b in 2..=50 {
            assert_eq!(forward_row_sum(b).unwrap(), BigRational::one());
            assert_eq!(total_rate_exact(b).unwrap(), r(b as i64 - 1, 1));
        }
    }

    #[test]
    fn inversion_matches_probabilities() {
        let b = 7;
        let rates = Rates { b };
        let mut cdf = 0.0;
        for k in 2..=b {
            let lo = cdf;
            cdf += forward_prob_f64(b, k);
            let mid = 0.5 * (lo + cdf);
            assert_eq!(rates.invert(mid), k);
        }
        assert_eq!(rates.invert(0.0), 2);
        assert_eq!(rates.invert(1.0 - 1e-16), b);
    }

    #[test]
    fn chain_small_cases() {
        assert!(simulate_chain(1, &mut rng(0)).unwrap().events.is_empty());
        let log = simulate_chain(2, &mut rng(0)).unwrap();
        assert_eq!(log.events.len(), 1);
        for i in 0..200 {
            simulate_chain(40, &mut rng(i)).unwrap().check().unwrap();
        }
    }

    fn figure_tree() -> RrtCoalescent {
        let parent = vec![0, 0, 0, 1, 2, 1, 4, 5, 5, 2];
        let clock = vec![0.0, 2.0, 0.5, 2.5, 2.6, 0.1, 2.7, 2.8, 2.9, 3.0];
        RrtCoalescent::from_parts(parent, clock).unwrap()
    }

    #[test]
    fn ten_vertex_example() {
        let c = figure_tree();
        let lc = c.last_collision(true).unwrap();
        assert_eq!((lc.mass, lc.blocks, lc.collisions), (5, 3, Some(3)));
        let run = c.replay(true);
        let parts = run.partitions.unwrap();
        assert_eq!(parts[0].to_string(), "{1} {2,6,8,9} {3} {4} {5} {7} {10}");
        assert_eq!(parts[2].len(), 1);
        run.log.check().unwrap();
    }

    #[test]
    fn replay_matches_last_collision() {
        for i in 0..300 {
            let n = 2 + (i as usize % 200);
            let c = RrtCoalescent::sample(n, &mut rng(i)).unwrap();
            let run = c.replay(true);
            run.log.check().unwrap();
            let last = run.log.last().unwrap();
            let lc = c.last_collision(true).unwrap();
            assert_eq!(lc.blocks, last.merged);
            assert_eq!(lc.absorption_time, last.time);
            assert_eq!(lc.collisions, Some(run.log.collision_count()));
            // before the last event, the block of 1 holds n - M elements
            let parts = run.partitions.unwrap();
            let before = if parts.len() >= 2 {
                parts[parts.len() - 2].blocks()[0].weight()
            } else {
                1
            };
            assert_eq!(n - lc.mass, before);
        }
    }

    #[test]
    fn two_vertices() {
        for i in 0..20 {
            let lc = sample_last_collision(2, &mut rng(i)).unwrap();
            assert_eq!((lc.mass, lc.blocks), (1, 2));
            let run = simulate_rrt_coalescent(2, &mut rng(i)).unwrap();
            assert_eq!(run.log.events.len(), 1);
        }
        assert!(sample_last_collision(1, &mut rng(0)).is_err());
    }

    #[test]
    fn partitions_consistent_with_block_counts() {
        let run = simulate_rrt_coalescent(60, &mut rng(4)).unwrap();
        for (e, p) in run.log.events.iter().zip(run.partitions.as_ref().unwrap()) {
            assert_eq!(p.len(), e.blocks_after);
        }
    }

    #[test]
    fn block_of_one_extremes() {
        let c = RrtCoalescent::sample(50, &mut rng(2)).unwrap();
        assert_eq!(c.block_of_one_size_at(0.0), 1);
        assert_eq!(c.block_of_one_size_at(f64::INFINITY), 50);
        let t = 0.8;
        assert_eq!(c.block_of_one_size_at(t), c.partition_at(t).blocks()[0].weight());
    }

    #[test]
    fn restriction_holds() {
        for i in 0..20 {
            assert!(restriction_check(2 + i as usize, &mut rng(i)).unwrap());
        }
    }

    #[test]
    fn fast_sampler_ranges() {
        for i in 0..500 {
            let lc = sample_last_collision(300, &mut rng(i)).unwrap();
            assert!(lc.mass >= 1 && lc.mass <= 299);
            assert!(lc.blocks >= 2 && lc.blocks <= lc.mass + 1);
            assert!(lc.absorption_time > 0.0);
        }
    }
}
