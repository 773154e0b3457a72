//! The cutting procedure on recursive trees: removing the subtree below a
//! chosen edge and merging its labels into the vertex above, the number of
//! cuts needed to isolate the root, edge records, and the marked-tree
//! partition.

use crate::error::{domain, Result};
use crate::rng::RngStream;
use crate::rrt::{Block, Partition, Tree};

/// Outcome of a single cut.
#[derive(Clone, Debug, PartialEq)]
pub struct CutResult {
    pub tree: Tree,
    /// Enlarged label of the vertex that absorbed the removed subtree.
    pub merged_into: Block,
    /// Index of that vertex in `tree`.
    pub absorbing_vertex: usize,
    pub removed_count: usize,
}

/// One weight per non-root vertex: `weight(v)` is the weight of the edge
/// joining `v` to its parent.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeights {
    w: Vec<f64>,
}

impl EdgeWeights {
    /// `weights[i]` belongs to the edge above vertex `i + 1`. Weights must be
    /// finite and pairwise distinct.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|x| !x.is_finite()) {
            return domain("edge weights must be finite");
        }
        let mut sorted = weights.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return domain("edge weights must be distinct");
        }
        Ok(Self { w: weights })
    }

    /// I.i.d. uniform weights for a tree with `n` vertices.
    pub fn uniform(n: usize, rng: &mut RngStream) -> Self {
        Self {
            w: (1..n).map(|_| rng.uniform()).collect(),
        }
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.w[v - 1]
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Removes the subtree rooted at `v` and merges its labels into the label of
/// `v`'s parent. Surviving vertices keep their relative order.
pub fn cut_edge(t: &Tree, v: usize) -> Result<CutResult> {
    if v == 0 || v >= t.len() {
        return domain(format!("cut_edge needs a non-root vertex, got {v}"));
    }
    let parents = t.parents();
    let n = t.len();
    let mut removed = vec![false; n];
    removed[v] = true;
    // descendants have larger indices, so one forward sweep marks the subtree
    for u in v + 1..n {
        removed[u] = removed[parents[u]];
    }
    let p = parents[v];
    let mut merged = t.label(p).clone();
    for u in v..n {
        if removed[u] {
            merged.absorb(t.label(u));
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut parent = Vec::new();
    let mut labels = Vec::new();
    for u in 0..n {
        if removed[u] {
            continue;
        }
        new_index[u] = parent.len();
        parent.push(if u == 0 { 0 } else { new_index[parents[u]] });
        labels.push(if u == p { merged.clone() } else { t.label(u).clone() });
    }
    let removed_count = n - parent.len();
    Ok(CutResult {
        tree: Tree::from_parts_unchecked(parent, labels),
        merged_into: merged,
        absorbing_vertex: new_index[p],
        removed_count,
    })
}

/// Children lists in compressed form: children of `v` are
/// `child[start[v]..start[v + 1]]`.
pub(crate) struct Children {
    pub start: Vec<usize>,
    pub child: Vec<usize>,
}

impl Children {
    pub fn new(parent: &[usize]) -> Self {
        let n = parent.len();
        let mut start = vec![0usize; n + 1];
        for &p in parent.iter().skip(1) {
            start[p + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut child = vec![0usize; n.saturating_sub(1)];
        for (v, &p) in parent.iter().enumerate().skip(1) {
            child[fill[p]] = v;
            fill[p] += 1;
        }
        Self { start, child }
    }

    pub fn of(&self, v: usize) -> &[usize] {
        &self.child[self.start[v]..self.start[v + 1]]
    }
}

/// Cuts uniformly chosen edges until only the root remains and returns the
/// number of cuts. Linear in the tree size.
pub fn cuts_to_isolate_root(t: &Tree, rng: &mut RngStream) -> usize {
    let n = t.len();
    let children = Children::new(t.parents());
    // alive non-root vertices with O(1) removal by swapping with the last
    let mut alive: Vec<usize> = (1..n).collect();
    let mut pos: Vec<usize> = (0..n).map(|v| v.wrapping_sub(1)).collect();
    let mut gone = vec![false; n];
    let mut stack = Vec::new();
    let mut cuts = 0;
    while !alive.is_empty() {
        let v = alive[rng.below(alive.len())];
        cuts += 1;
        stack.push(v);
        while let Some(u) = stack.pop() {
            let i = pos[u];
            let last = *alive.last().unwrap();
            alive.swap_remove(i);
            if last != u {
                pos[last] = i;
            }
            gone[u] = true;
            stack.extend(children.of(u).iter().copied().filter(|&w| !gone[w]));
        }
    }
    cuts
}

/// Runs the cutting procedure with explicit label merging, one [`cut_edge`]
/// per step. Returns the number of cuts and the final single-vertex tree.
pub fn isolate_root_with_labels(t: &Tree, rng: &mut RngStream) -> (usize, Tree) {
    let mut cur = t.clone();
    let mut cuts = 0;
    while cur.len() > 1 {
        let v = 1 + rng.below(cur.len() - 1);
        cur = cut_edge(&cur, v).expect("v is a non-root vertex").tree;
        cuts += 1;
    }
    (cuts, cur)
}

/// Number of edges whose weight exceeds every other weight on the path from
/// the root down to that edge.
pub fn count_records(t: &Tree, w: &EdgeWeights) -> Result<usize> {
    if w.len() + 1 != t.len() {
        return domain("one edge weight per non-root vertex required");
    }
    let parents = t.parents();
    let mut path_max = vec![f64::NEG_INFINITY; t.len()];
    let mut records = 0;
    for v in 1..t.len() {
        let x = w.weight(v);
        let above = path_max[parents[v]];
        if x > above {
            records += 1;
            path_max[v] = x;
        } else {
            path_max[v] = above;
        }
    }
    Ok(records)
}

/// Uniform recursive tree on `n` vertices with an Exp(1) clock on the edge
/// above every non-root vertex. Parent and clock of vertex `v` are drawn
/// together, so the first `m` vertices do not depend on `n`.
/// `clocks[0]` is `+inf`.
pub(crate) fn tree_with_clocks(n: usize, rng: &mut RngStream) -> (Vec<usize>, Vec<f64>) {
    let mut parent = vec![0usize; n];
    let mut clock = vec![f64::INFINITY; n];
    for v in 1..n {
        parent[v] = rng.below(v);
        clock[v] = rng.exp1();
    }
    (parent, clock)
}

/// For each vertex, the vertex whose label it belongs to once every edge with
/// clock below `t` has been marked: the nearest vertex on its root path with
/// no marked edge above it.
pub(crate) fn representatives(parent: &[usize], clock: &[f64], t: f64) -> Vec<usize> {
    let n = parent.len();
    let mut present = vec![true; n];
    let mut rep: Vec<usize> = (0..n).collect();
    for v in 1..n {
        let p = parent[v];
        present[v] = present[p] && clock[v] >= t;
        if !present[v] {
            rep[v] = if present[p] { p } else { rep[p] };
        }
    }
    rep
}

/// Partition of `[n]` induced by marking the edge above each vertex whose
/// clock is below `t` and joining every vertex to its nearest unmarked-path
/// ancestor. Vertex `v` stands for the integer `v + 1`.
pub fn marked_partition_from(parent: &[usize], clock: &[f64], t: f64) -> Result<Partition> {
    if parent.len() != clock.len() {
        return domain("one clock per vertex required");
    }
    if !(t >= 0.0) {
        return domain("time must be nonnegative");
    }
    Ok(Partition::from_groups(&representatives(parent, clock, t)))
}

/// Marked random recursive tree on `[n]` at time `t`.
pub fn marked_tree_partition(n: usize, t: f64, rng: &mut RngStream) -> Result<Partition> {
    if n == 0 {
        return domain("marked_tree_partition needs n >= 1");
    }
    let (parent, clock) = tree_with_clocks(n, rng);
    marked_partition_from(&parent, &clock, t)
}
