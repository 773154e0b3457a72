//! Random recursive trees, label blocks and partitions, and the
//! correspondences with the Chinese restaurant process and permutations.
//!
//! Vertices are indexed `0..n` with vertex `0` the root; the parent of vertex
//! `v >= 1` is a vertex with a smaller index. Labels are [`Block`]s of positive
//! integers. A freshly generated tree carries the singleton label `{v + 1}` on
//! vertex `v`, so vertex index `v` is the element `v + 1` of `[n]`.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;

/// Largest `n` accepted by [`enumerate_rrts`]; `7! = 5040` trees.
pub const MAX_ENUMERATION: usize = 8;

/// A nonempty set of positive integers, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    elements: Vec<usize>,
}

impl Block {
    pub fn new(mut elements: Vec<usize>) -> Result<Self> {
        if elements.is_empty() {
            return domain("a block must be nonempty");
        }
        elements.sort_unstable();
        if elements[0] == 0 {
            return domain("block elements are positive integers");
        }
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return domain("repeated element in block");
        }
        Ok(Self { elements })
    }

    pub fn singleton(element: usize) -> Self {
        assert!(element > 0, "block elements are positive integers");
        Self {
            elements: vec![element],
        }
    }

    pub fn least(&self) -> usize {
        self.elements[0]
    }

    /// Number of integers in the block.
    pub fn weight(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, e: usize) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// Adds the elements of a disjoint block.
    pub fn absorb(&mut self, other: &Block) {
        let mut merged = Vec::with_capacity(self.elements.len() + other.elements.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elements, &other.elements);
        while i < a.len() && j < b.len() {
            if a[i] < b[j] {
                merged.push(a[i]);
                i += 1;
            } else {
                debug_assert_ne!(a[i], b[j], "absorbing an overlapping block");
                merged.push(b[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        self.elements = merged;
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A partition of `[n]` into blocks ordered by least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Block>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<Block>) -> Result<Self> {
        blocks.sort_unstable_by_key(Block::least);
        let mut seen = vec![false; n + 1];
        let mut total = 0;
        for b in &blocks {
            for &e in b.elements() {
                if e > n {
                    return domain(format!("element {e} outside [{n}]"));
                }
                if seen[e] {
                    return domain(format!("element {e} appears in two blocks"));
                }
                seen[e] = true;
                total += 1;
            }
        }
        if total != n {
            return domain(format!("blocks cover {total} of {n} elements"));
        }
        Ok(Self { n, blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (1..=n).map(Block::singleton).collect(),
        }
    }

    /// Builds the partition in which element `i + 1` lies in group `group[i]`.
    pub fn from_groups(group: &[usize]) -> Self {
        let n = group.len();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; group.iter().copied().max().map_or(0, |m| m + 1)];
        for (i, &g) in group.iter().enumerate() {
            if slot[g] == usize::MAX {
                slot[g] = members.len();
                members.push(Vec::new());
            }
            members[slot[g]].push(i + 1);
        }
        // groups were opened in order of their least element
        let blocks = members.into_iter().map(|elements| Block { elements }).collect();
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Index of the block containing `e`.
    pub fn block_of(&self, e: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(e))
    }

    /// Restriction to `[m]`: drop elements above `m`, then empty blocks.
    pub fn restrict(&self, m: usize) -> Partition {
        let blocks = self
            .blocks
            .iter()
            .filter(|b| b.least() <= m)
            .map(|b| Block {
                elements: b.elements.iter().copied().take_while(|&e| e <= m).collect(),
            })
            .collect();
        Partition {
            n: m.min(self.n),
            blocks,
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A recursive tree: flat parent array plus one label per vertex.
///
/// Invariants: `parent[v] < v` for `v >= 1`; labels are pairwise disjoint;
/// least elements strictly increase with the vertex index (hence along every
/// root-to-leaf path).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<usize>,
    labels: Vec<Block>,
}

impl Tree {
    /// `parent[0]` is ignored (the root has no parent).
    pub fn new(mut parent: Vec<usize>, labels: Vec<Block>) -> Result<Self> {
        if parent.is_empty() {
            return domain("a tree has at least one vertex");
        }
        if parent.len() != labels.len() {
            return domain("one label per vertex required");
        }
        parent[0] = 0;
        for (v, &p) in parent.iter().enumerate().skip(1) {
            if p >= v {
                return domain(format!("vertex {v} has parent {p}, not an earlier vertex"));
            }
        }
        if labels.windows(2).any(|w| w[0].least() >= w[1].least()) {
            return domain("labels must increase with the vertex index");
        }
        let mut all: Vec<usize> = labels.iter().flat_map(|b| b.elements().iter().copied()).collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return domain("labels must be disjoint");
        }
        Ok(Self { parent, labels })
    }

    /// Tree with singleton labels `{v + 1}`.
    pub fn with_singletons(parent: Vec<usize>) -> Result<Self> {
        let labels = (1..=parent.len()).map(Block::singleton).collect();
        Self::new(parent, labels)
    }

    pub(crate) fn from_parts_unchecked(parent: Vec<usize>, labels: Vec<Block>) -> Self {
        Self { parent, labels }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v > 0 && v < self.parent.len()).then(|| self.parent[v])
    }

    /// Parent array with `parents()[0] == 0` for the root.
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn label(&self, v: usize) -> &Block {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Block] {
        &self.labels
    }

    /// Total number of integers carried by the labels.
    pub fn ground_size(&self) -> usize {
        self.labels.iter().map(Block::weight).sum()
    }

    pub fn is_singleton_labeled(&self) -> bool {
        self.labels
            .iter()
            .enumerate()
            .all(|(v, b)| b.weight() == 1 && b.least() == v + 1)
    }

    /// Vertex counts of the subtrees rooted at each vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        subtree_sizes(&self.parent)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for v in 1..self.len() {
            out[self.parent[v]].push(v);
        }
        out
    }

    /// The labels as a partition of `[ground_size]`.
    pub fn label_partition(&self) -> Result<Partition> {
        Partition::new(self.ground_size(), self.labels.clone())
    }
}

pub(crate) fn subtree_sizes(parent: &[usize]) -> Vec<usize> {
    let mut size = vec![1usize; parent.len()];
    for v in (1..parent.len()).rev() {
        size[parent[v]] += size[v];
    }
    size
}

/// Attachment sequence of a uniform recursive tree: vertex `v` picks a parent
/// uniformly from `0..v`. Draws for vertex `v` never depend on `n`.
pub(crate) fn random_parents(n: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut parent = vec![0usize; n];
    for (v, p) in parent.iter_mut().enumerate().skip(1) {
        *p = rng.below(v);
    }
    parent
}

/// Uniform random recursive tree on `[n]` with singleton labels.
pub fn generate_rrt(n: usize, rng: &mut RngStream) -> Result<Tree> {
    if n == 0 {
        return domain("generate_rrt needs n >= 1");
    }
    let parent = random_parents(n, rng);
    let labels = (1..=n).map(Block::singleton).collect();
    Ok(Tree::from_parts_unchecked(parent, labels))
}

/// Uniform random recursive tree whose vertices carry the blocks of `blocks`
/// in least-element order.
pub fn generate_labeled_rrt(blocks: &Partition, rng: &mut RngStream) -> Result<Tree> {
    if blocks.is_empty() {
        return domain("generate_labeled_rrt needs a nonempty partition");
    }
    let parent = random_parents(blocks.len(), rng);
    Ok(Tree::from_parts_unchecked(parent, blocks.blocks().to_vec()))
}

/// All `(n-1)!` recursive trees on `[n]`, in lexicographic order of their
/// parent arrays.
pub fn enumerate_rrts(n: usize) -> Result<Vec<Tree>> {
    if n == 0 {
        return domain("enumerate_rrts needs n >= 1");
    }
    if n > MAX_ENUMERATION {
        return Err(Error::Size(format!(
            "enumerate_rrts is capped at n = {MAX_ENUMERATION}, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut parent = vec![0usize; n];
    loop {
        out.push(Tree::with_singletons(parent.clone())?);
        // odometer: digit v ranges over 0..v
        let mut v = n - 1;
        loop {
            if v == 0 {
                return Ok(out);
            }
            if parent[v] + 1 < v {
                parent[v] += 1;
                break;
            }
            parent[v] = 0;
            v -= 1;
        }
    }
}

/// Position of a parent array among [`enumerate_rrts`]`(n)` (mixed radix).
pub fn shape_index(parent: &[usize]) -> usize {
    let mut idx = 0;
    for (v, &p) in parent.iter().enumerate().skip(1) {
        idx = idx * v + p;
    }
    idx
}

/// A permutation of `[n]`, stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// `image[i - 1]` is the image of `i`.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut hit = vec![false; n + 1];
        for &x in &image {
            if x == 0 || x > n || hit[x] {
                return domain("not a bijection on [n]");
            }
            hit[x] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Cycles in standard form: each cycle starts at its least element and
    /// cycles are listed by increasing least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n + 1];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.apply(i);
            }
            out.push(cycle);
        }
        out
    }

    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image = vec![0usize; n];
        for c in cycles {
            for (j, &i) in c.iter().enumerate() {
                if i == 0 || i > n {
                    return domain("cycle element outside [n]");
                }
                image[i - 1] = c[(j + 1) % c.len()];
            }
        }
        Self::new(image)
    }

    /// Cycle lengths sorted decreasingly.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }
}

/// Reads a recursive tree on `n + 1` vertices as a permutation of `[n]`.
///
/// Vertex index `i` plays individual `i` (the relabelling `[n+1] -> {0..n}`);
/// the root is individual `0` and is not part of the permutation. A vertex
/// attached to the root opens a new cycle; a vertex `k` attached to `j >= 1`
/// sits directly to the left of `j`, i.e. `k` is inserted right after `j` in
/// `j`'s cycle.
pub fn tree_to_permutation(t: &Tree) -> Result<Permutation> {
    if !t.is_singleton_labeled() {
        return domain("tree_to_permutation expects singleton labels {v + 1}");
    }
    let n = t.len() - 1;
    let mut image: Vec<usize> = (1..=n).collect();
    for k in 1..=n {
        let j = t.parents()[k];
        if j != 0 {
            image[k - 1] = image[j - 1];
            image[j - 1] = k;
        }
    }
    Permutation::new(image)
}

fn check_crp_params(alpha: f64, theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) || !(theta > -alpha) || !theta.is_finite() {
        return domain(format!(
            "CRP needs 0 <= alpha < 1 and theta > -alpha, got ({alpha}, {theta})"
        ));
    }
    Ok(())
}

/// Table index of each customer under the `(alpha, theta)` seating rule.
pub(crate) fn crp_tables(n: usize, alpha: f64, theta: f64, rng: &mut RngStream) -> Vec<usize> {
    let mut table = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for m in 0..n {
        if m == 0 {
            sizes.push(1);
            table.push(0);
            continue;
        }
        let k = sizes.len() as f64;
        let total = m as f64 + theta;
        let mut u = rng.uniform() * total;
        let new_table = theta + alpha * k;
        if u < new_table {
            table.push(sizes.len());
            sizes.push(1);
            continue;
        }
        u -= new_table;
        let mut chosen = sizes.len() - 1;
        for (i, &s) in sizes.iter().enumerate() {
            let w = s as f64 - alpha;
            if u < w {
                chosen = i;
                break;
            }
            u -= w;
        }
        sizes[chosen] += 1;
        table.push(chosen);
    }
    table
}

/// Partition of `[n]` from the `(alpha, theta)` Chinese restaurant process.
pub fn generate_crp(n: usize, alpha: f64, theta: f64, rng: &mut RngStream) -> Result<Partition> {
    check_crp_params(alpha, theta)?;
    if n == 0 {
        return domain("generate_crp needs n >= 1");
    }
    Ok(Partition::from_groups(&crp_tables(n, alpha, theta, rng)))
}

/// Number of tables occupied by `n` customers.
pub fn crp_table_count(n: usize, alpha: f64, theta: f64, rng: &mut RngStream) -> Result<usize> {
    check_crp_params(alpha, theta)?;
    Ok(crp_tables(n, alpha, theta, rng).into_iter().max().map_or(0, |m| m + 1))
}

/// `|first block| / n`, the finite-n proxy for the first asymptotic frequency.
pub fn first_block_frequency(p: &Partition) -> Result<f64> {
    match p.blocks().first() {
        Some(b) if p.n() > 0 => Ok(b.weight() as f64 / p.n() as f64),
        _ => domain("first_block_frequency needs a nonempty partition"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn rng(i: u64) -> RngStream {
        RngStream::new(2024, i)
    }

    #[test]
    fn block_rejects_bad_input() {
        assert!(Block::new(vec![]).is_err());
        assert!(Block::new(vec![0, 1]).is_err());
        assert!(Block::new(vec![3, 3]).is_err());
        let b = Block::new(vec![9, 2, 5]).unwrap();
        assert_eq!(b.least(), 2);
        assert_eq!(b.weight(), 3);
    }

    #[test]
    fn absorb_keeps_order() {
        let mut a = Block::new(vec![1, 7]).unwrap();
        a.absorb(&Block::new(vec![3, 8, 10]).unwrap());
        assert_eq!(a.elements(), &[1, 3, 7, 8, 10]);
    }

    #[test]
    fn partition_validation() {
        let b = |v: Vec<usize>| Block::new(v).unwrap();
        assert!(Partition::new(3, vec![b(vec![1, 2]), b(vec![3])]).is_ok());
        assert!(Partition::new(3, vec![b(vec![1, 2]), b(vec![2, 3])]).is_err());
        assert!(Partition::new(3, vec![b(vec![1, 2])]).is_err());
        let p = Partition::new(4, vec![b(vec![2, 4]), b(vec![1, 3])]).unwrap();
        assert_eq!(p.blocks()[0].least(), 1);
        assert_eq!(p.restrict(3).to_string(), "{1,3} {2}");
    }

    #[test]
    fn from_groups_orders_by_least() {
        let p = Partition::from_groups(&[5, 2, 5, 2, 9]);
        assert_eq!(p.to_string(), "{1,3} {2,4} {5}");
    }

    #[test]
    fn single_vertex_tree() {
        let t = generate_rrt(1, &mut rng(0)).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.parent(0).is_none());
        assert!(generate_rrt(0, &mut rng(0)).is_err());
    }

    #[test]
    fn generated_trees_satisfy_invariants() {
        let t = generate_rrt(500, &mut rng(1)).unwrap();
        assert!(Tree::new(t.parents().to_vec(), t.labels().to_vec()).is_ok());
        assert_eq!(t.subtree_sizes()[0], 500);
    }

    #[test]
    fn tree_new_rejects_non_recursive() {
        assert!(Tree::with_singletons(vec![0, 0, 2]).is_err());
        let labels = vec![Block::singleton(2), Block::singleton(1)];
        assert!(Tree::new(vec![0, 0], labels).is_err());
    }

    #[test]
    fn three_vertices_two_shapes_equally_likely() {
        let mut counts = [0usize; 2];
        for i in 0..20_000 {
            let t = generate_rrt(3, &mut rng(i)).unwrap();
            counts[shape_index(t.parents())] += 1;
        }
        let f = counts[0] as f64 / 20_000.0;
        assert!((f - 0.5).abs() < 0.015, "{counts:?}");
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_rrts(1).unwrap().len(), 1);
        assert_eq!(enumerate_rrts(2).unwrap().len(), 1);
        assert_eq!(enumerate_rrts(4).unwrap().len(), 6);
        let five = enumerate_rrts(5).unwrap();
        assert_eq!(five.len(), 24);
        for (i, t) in five.iter().enumerate() {
            assert_eq!(shape_index(t.parents()), i);
        }
        assert_eq!(enumerate_rrts(8).unwrap().len(), 5040);
        assert!(matches!(enumerate_rrts(9), Err(Error::Size(_))));
        assert!(enumerate_rrts(0).is_err());
    }

    #[test]
    fn labeled_tree_uses_blocks_in_order() {
        let b = |v: Vec<usize>| Block::new(v).unwrap();
        let p = Partition::new(4, vec![b(vec![1, 3]), b(vec![2]), b(vec![4])]).unwrap();
        let mut counts = [0usize; 2];
        for i in 0..10_000 {
            let t = generate_labeled_rrt(&p, &mut rng(i)).unwrap();
            assert_eq!(t.label(0).elements(), &[1, 3]);
            assert_eq!(t.label(2).elements(), &[4]);
            counts[shape_index(t.parents())] += 1;
        }
        assert!((counts[0] as f64 / 10_000.0 - 0.5).abs() < 0.025);
        let empty = Partition::new(0, vec![]).unwrap();
        assert!(generate_labeled_rrt(&empty, &mut rng(0)).is_err());
    }

    #[test]
    fn permutation_small_cases() {
        let t = Tree::with_singletons(vec![0, 0]).unwrap();
        assert_eq!(tree_to_permutation(&t).unwrap(), Permutation::identity(1));
        // 1 and 2 both attach to the root: two fixed points
        let t = Tree::with_singletons(vec![0, 0, 0]).unwrap();
        assert_eq!(tree_to_permutation(&t).unwrap().cycles(), vec![vec![1], vec![2]]);
        // 2 attaches to 1, 3 attaches to 1: 3 sits left of 1, 2 left of 3
        let t = Tree::with_singletons(vec![0, 0, 1, 1]).unwrap();
        let p = tree_to_permutation(&t).unwrap();
        assert_eq!(p.cycles(), vec![vec![1, 3, 2]]);
    }

    #[test]
    fn permutation_cycles_are_root_subtrees() {
        let t = generate_rrt(60, &mut rng(5)).unwrap();
        let perm = tree_to_permutation(&t).unwrap();
        let sizes = t.subtree_sizes();
        let mut root_sub: Vec<usize> =
            (1..t.len()).filter(|&v| t.parents()[v] == 0).map(|v| sizes[v]).collect();
        root_sub.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(perm.cycle_type(), root_sub);
    }

    #[test]
    fn permutation_rejects_relabelled_input() {
        let labels = vec![Block::new(vec![1, 2]).unwrap(), Block::singleton(3)];
        let t = Tree::new(vec![0, 0], labels).unwrap();
        assert!(tree_to_permutation(&t).is_err());
    }

    #[test]
    fn crp_parameter_guards() {
        assert!(generate_crp(3, 1.0, 1.0, &mut rng(0)).is_err());
        assert!(generate_crp(3, 0.5, -0.5, &mut rng(0)).is_err());
        assert!(generate_crp(3, -0.1, 1.0, &mut rng(0)).is_err());
        assert_eq!(generate_crp(1, 0.0, 1.0, &mut rng(0)).unwrap().to_string(), "{1}");
    }

    #[test]
    fn crp_two_customers_half_new_table() {
        let mut two = 0;
        let trials = 20_000;
        for i in 0..trials {
            if generate_crp(2, 0.0, 1.0, &mut rng(i)).unwrap().len() == 2 {
                two += 1;
            }
        }
        assert!((two as f64 / trials as f64 - 0.5).abs() < 0.015);
    }

    #[test]
    fn crp_zero_theta_second_customer() {
        // (alpha, 0): customer 2 opens a table with probability alpha
        let alpha = 0.3;
        let trials = 40_000;
        let two = (0..trials)
            .filter(|&i| generate_crp(2, alpha, 0.0, &mut rng(i)).unwrap().len() == 2)
            .count();
        assert!((two as f64 / trials as f64 - alpha).abs() < 0.012);
    }

    #[test]
    fn first_block_frequency_values() {
        let b = |v: Vec<usize>| Block::new(v).unwrap();
        let p = Partition::new(2, vec![b(vec![1]), b(vec![2])]).unwrap();
        assert_eq!(first_block_frequency(&p).unwrap(), 0.5);
        let p = Partition::new(3, vec![b(vec![1, 2, 3])]).unwrap();
        assert_eq!(first_block_frequency(&p).unwrap(), 1.0);
        assert!(first_block_frequency(&Partition::new(0, vec![]).unwrap()).is_err());
    }

    #[test]
    fn stream_prefix_gives_same_attachments() {
        let a = generate_rrt(40, &mut rng(77)).unwrap();
        let b = generate_rrt(41, &mut rng(77)).unwrap();
        assert_eq!(&b.parents()[..40], a.parents());
    }

    #[test]
    fn crp_theta_one_matches_permutation_cycle_counts_roughly() {
        let mut crp: HashMap<usize, usize> = HashMap::new();
        let mut perm: HashMap<usize, usize> = HashMap::new();
        for i in 0..20_000 {
            *crp.entry(generate_crp(4, 0.0, 1.0, &mut rng(i)).unwrap().len()).or_default() += 1;
            let t = generate_rrt(5, &mut rng(100_000 + i)).unwrap();
            *perm.entry(tree_to_permutation(&t).unwrap().cycles().len()).or_default() += 1;
        }
        for k in 1..=4 {
            let a = *crp.get(&k).unwrap_or(&0) as f64 / 20_000.0;
            let b = *perm.get(&k).unwrap_or(&0) as f64 / 20_000.0;
            assert!((a - b).abs() < 0.02, "k={k}: {a} vs {b}");
        }
    }
}
