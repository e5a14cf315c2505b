//! Exact minimum-disagreement clustering for small instances.
//!
//! Small graphs are enumerated outright as restricted growth strings, so
//! leaves arrive in lexicographic order of their canonical assignments.
//! Larger ones use branch-and-bound over vertex-to-cluster assignments with a
//! lower bound built from per-vertex attachment costs and an edge-disjoint
//! `(+,+,-)` triangle packing. Among equally good clusterings the
//! lexicographically smallest canonical assignment is returned.

use crate::bitset::BitSet;
use crate::graph::{count_disagreements, Clustering, SignedGraph, Vertex};
use crate::rng::{stream_rng, Stream};
use rand::Rng;
use thiserror::Error;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error(
        "exact search exhausted its budget of {budget} nodes on a {n}-vertex graph \
         (lower bound {lower_bound}, best known {best_known})"
    )]
    BudgetExhausted {
        n: usize,
        budget: u64,
        lower_bound: u64,
        best_known: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Enumerate up to `enumeration_limit` vertices, branch-and-bound beyond.
    Auto,
    Enumerate,
    BranchAndBound,
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    /// Maximum number of search nodes before giving up.
    pub node_budget: u64,
    pub strategy: Strategy,
    pub enumeration_limit: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            strategy: Strategy::Auto,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

impl ExactConfig {
    pub fn with_budget(node_budget: u64) -> Self {
        ExactConfig {
            node_budget,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    /// Canonical optimal clustering.
    pub clustering: Clustering,
    /// `C_OPT`.
    pub cost: u64,
    pub nodes_explored: u64,
}

pub fn solve_exact(g: &SignedGraph, config: &ExactConfig) -> Result<ExactResult, ExactError> {
    let enumerate = match config.strategy {
        Strategy::Enumerate => true,
        Strategy::BranchAndBound => false,
        Strategy::Auto => g.n() <= config.enumeration_limit,
    };
    let result = if enumerate {
        enumerate_partitions(g, config.node_budget)
    } else {
        BranchAndBound::new(g, config.node_budget).run()
    }?;
    debug_assert_eq!(
        count_disagreements(g, &result.clustering).ok(),
        Some(result.cost)
    );
    Ok(result)
}

/// Size of a greedily built edge-disjoint packing of `(+,+,-)` triangles;
/// every clustering errs at least once in each packed triangle.
pub fn lower_bound_ppm(g: &SignedGraph) -> u64 {
    let n = g.n();
    TrianglePacker::new(g).pack(&BitSet::full(n))
}

fn enumerate_partitions(g: &SignedGraph, budget: u64) -> Result<ExactResult, ExactError> {
    let n = g.n();
    let mut e = Enumerator {
        g,
        members: Vec::with_capacity(n),
        assignment: vec![0; n],
        best: None,
        nodes: 0,
        budget,
    };
    let assigned = BitSet::new(n);
    e.descend(0, 0, assigned)?;
    let (cost, assignment) = e.best.expect("at least one partition exists");
    Ok(ExactResult {
        clustering: Clustering::from_assignment(assignment),
        cost,
        nodes_explored: e.nodes,
    })
}

struct Enumerator<'a> {
    g: &'a SignedGraph,
    members: Vec<BitSet>,
    assignment: Vec<usize>,
    best: Option<(u64, Vec<usize>)>,
    nodes: u64,
    budget: u64,
}

impl Enumerator<'_> {
    fn descend(&mut self, v: Vertex, cost: u64, mut assigned: BitSet) -> Result<(), ExactError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(ExactError::BudgetExhausted {
                n: self.g.n(),
                budget: self.budget,
                lower_bound: 0,
                best_known: self
                    .best
                    .as_ref()
                    .map_or(self.g.plus_edge_count() as u64, |b| b.0),
            });
        }
        if v == self.g.n() {
            // strict improvement only: the first leaf at a cost is lex-smallest
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.assignment.clone()));
            }
            return Ok(());
        }
        let row = self.g.plus_neighbors(v);
        let plus_to_assigned = row.intersection_count(&assigned) as u64;
        assigned.insert(v);
        for j in 0..=self.members.len() {
            let delta = if j < self.members.len() {
                let size = self.members[j].count() as u64;
                let inside = row.intersection_count(&self.members[j]) as u64;
                (size - inside) + (plus_to_assigned - inside)
            } else {
                plus_to_assigned
            };
            if j == self.members.len() {
                self.members.push(BitSet::new(self.g.n()));
            }
            self.members[j].insert(v);
            self.assignment[v] = j;
            let r = self.descend(v + 1, cost + delta, assigned.clone());
            self.members[j].remove(v);
            if self.members[j].is_empty() {
                self.members.pop();
            }
            r?;
        }
        Ok(())
    }
}

/// Greedy edge-disjoint `(+,+,-)` triangle packing restricted to a vertex set.
struct TrianglePacker<'a> {
    g: &'a SignedGraph,
}

impl<'a> TrianglePacker<'a> {
    fn new(g: &'a SignedGraph) -> Self {
        TrianglePacker { g }
    }

    /// Triangles whose edges appear in fewest candidate triangles are packed
    /// first, which tends to leave room for more.
    fn pack(&self, within: &BitSet) -> u64 {
        let n = self.g.n();
        let verts: Vec<Vertex> = within.iter().collect();
        let mut triangles: Vec<[Vertex; 3]> = Vec::new();
        for (i, &a) in verts.iter().enumerate() {
            for (j, &b) in verts.iter().enumerate().skip(i + 1) {
                for &c in &verts[j + 1..] {
                    let plus = self.g.is_plus(a, b) as u8
                        + self.g.is_plus(a, c) as u8
                        + self.g.is_plus(b, c) as u8;
                    if plus == 2 {
                        triangles.push([a, b, c]);
                    }
                }
            }
        }
        if triangles.is_empty() {
            return 0;
        }
        let idx = |u: Vertex, v: Vertex| u.min(v) * n + u.max(v);
        let mut load = vec![0u32; n * n];
        for t in &triangles {
            load[idx(t[0], t[1])] += 1;
            load[idx(t[0], t[2])] += 1;
            load[idx(t[1], t[2])] += 1;
        }
        triangles
            .sort_by_key(|t| load[idx(t[0], t[1])] + load[idx(t[0], t[2])] + load[idx(t[1], t[2])]);
        let mut used = vec![false; n * n];
        let mut packed = 0;
        for t in &triangles {
            let e = [idx(t[0], t[1]), idx(t[0], t[2]), idx(t[1], t[2])];
            if e.iter().all(|&k| !used[k]) {
                for k in e {
                    used[k] = true;
                }
                packed += 1;
            }
        }
        packed
    }
}

/// Local-search upper bound: randomized pivoting followed by single-vertex
/// moves until no move improves.
pub(crate) fn heuristic_clustering(g: &SignedGraph, restarts: u64) -> (u64, Clustering) {
    let n = g.n();
    let mut best: Option<(u64, Clustering)> = None;
    for seed in 0..restarts.max(1) {
        let mut rng = stream_rng(seed, Stream::Pivot);
        let mut remaining: Vec<Vertex> = (0..n).collect();
        let mut assignment = vec![0usize; n];
        let mut id = 0;
        while !remaining.is_empty() {
            let pivot = remaining[rng.random_range(0..remaining.len())];
            remaining.retain(|&v| {
                if v == pivot || g.is_plus(pivot, v) {
                    assignment[v] = id;
                    false
                } else {
                    true
                }
            });
            id += 1;
        }
        local_search(g, &mut assignment);
        let c = Clustering::from_assignment(assignment).canonicalize();
        let cost = count_disagreements(g, &c).expect("sizes match");
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, c));
        }
    }
    best.expect("at least one restart")
}

fn local_search(g: &SignedGraph, assignment: &mut [usize]) {
    let n = g.n();
    if n == 0 {
        return;
    }
    let slots = n + 1;
    let mut size = vec![0i64; slots];
    for &c in assignment.iter() {
        size[c] += 1;
    }
    loop {
        let mut improved = false;
        for v in 0..n {
            let mut plus_to = vec![0i64; slots];
            for u in g.plus_neighbors(v).iter() {
                plus_to[assignment[u]] += 1;
            }
            let cur = assignment[v];
            // cost of v's incident pairs if v sits in cluster c (v excluded)
            let deg = g.plus_degree(v) as i64;
            let cost_in = |c: usize, own: bool| {
                let s = size[c] - own as i64;
                (s - plus_to[c]) + (deg - plus_to[c])
            };
            let current = cost_in(cur, true);
            let mut target = cur;
            let mut target_cost = current;
            for c in 0..slots {
                if c == cur {
                    continue;
                }
                let cost = if size[c] == 0 { deg } else { cost_in(c, false) };
                if cost < target_cost {
                    target = c;
                    target_cost = cost;
                }
            }
            if target != cur {
                size[cur] -= 1;
                size[target] += 1;
                assignment[v] = target;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

/// Branch-and-bound driver. A first search, with vertices ordered by the
/// heuristic's clusters largest first, settles the optimal cost; then each
/// vertex in ID order is fixed to the smallest cluster label that still
/// admits an optimum, one feasibility search per candidate label.
struct BranchAndBound<'a> {
    g: &'a SignedGraph,
    budget: u64,
    nodes: u64,
    root_bound: u64,
    /// heuristic clusters, largest first, flattened
    preferred: Vec<Vertex>,
    heuristic: (u64, Clustering),
}

impl<'a> BranchAndBound<'a> {
    fn new(g: &'a SignedGraph, budget: u64) -> Self {
        let heuristic = heuristic_clustering(g, 16);
        let mut clusters = heuristic.1.clusters();
        clusters.sort_by_key(|c| std::cmp::Reverse(c.len()));
        BranchAndBound {
            g,
            budget,
            nodes: 0,
            root_bound: lower_bound_ppm(g),
            preferred: clusters.into_iter().flatten().collect(),
            heuristic,
        }
    }

    fn run(mut self) -> Result<ExactResult, ExactError> {
        let n = self.g.n();
        let (mut cost, mut best) = self.heuristic.clone();
        if cost > self.root_bound {
            let order = self.preferred.clone();
            if let Some((c, a)) = self.search(order, &[], cost, false)? {
                cost = c;
                best = a;
            }
        }
        let mut current = best.canonicalize().assignment().to_vec();
        for v in 1..n {
            for label in 0..current[v] {
                let mut forced = current[..v].to_vec();
                forced.push(label);
                let order: Vec<Vertex> = (0..=v)
                    .chain(self.preferred.iter().copied().filter(|&u| u > v))
                    .collect();
                if let Some((_, a)) = self.search(order, &forced, cost + 1, true)? {
                    current = a.canonicalize().assignment().to_vec();
                    debug_assert_eq!(current[v], label);
                    break;
                }
            }
        }
        Ok(ExactResult {
            clustering: Clustering::from_assignment(current),
            cost,
            nodes_explored: self.nodes,
        })
    }

    /// Clusterings cheaper than `limit` whose first `forced.len()` vertices in
    /// `order` carry the given labels. Returns the cheapest found, or the
    /// first one when `first_only`.
    fn search(
        &mut self,
        order: Vec<Vertex>,
        forced: &[usize],
        limit: u64,
        first_only: bool,
    ) -> Result<Option<(u64, Clustering)>, ExactError> {
        let n = self.g.n();
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let h = SignedGraph::new(
            n,
            self.g.plus_edges().map(|(u, v)| (position[u], position[v])),
        )
        .expect("relabeling preserves validity");
        let mut s = Search {
            g: &h,
            packer: TrianglePacker::new(&h),
            n,
            forced,
            suffix_bound: vec![None; n + 1],
            limit,
            first_only,
            best: None,
            nodes: self.nodes,
            budget: self.budget,
            assignment: vec![0; n],
            sizes: Vec::with_capacity(n),
            plus_to: vec![vec![0; n]; n],
            plus_assigned: vec![0; n],
        };
        let r = s.descend(0, 0);
        self.nodes = s.nodes;
        if r.is_err() {
            return Err(ExactError::BudgetExhausted {
                n,
                budget: self.budget,
                lower_bound: self.root_bound,
                best_known: self.heuristic.0,
            });
        }
        Ok(s.best.map(|(cost, by_position)| {
            let assignment = (0..n).map(|v| by_position[position[v]]).collect();
            (cost, Clustering::from_assignment(assignment))
        }))
    }
}

struct Search<'a> {
    g: &'a SignedGraph,
    packer: TrianglePacker<'a>,
    n: usize,
    forced: &'a [usize],
    /// packing bound over `k..n`, computed on demand
    suffix_bound: Vec<Option<u64>>,
    limit: u64,
    first_only: bool,
    best: Option<(u64, Vec<usize>)>,
    nodes: u64,
    budget: u64,
    assignment: Vec<usize>,
    sizes: Vec<i64>,
    /// plus_to[u][j]: + edges from unassigned u into cluster j
    plus_to: Vec<Vec<i64>>,
    /// + edges from u to already-assigned vertices
    plus_assigned: Vec<i64>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.first_only && self.best.is_some()
    }

    fn rest_bound(&mut self, k: usize) -> u64 {
        let k = k.max(self.forced.len()).min(self.n);
        if let Some(b) = self.suffix_bound[k] {
            return b;
        }
        let mut within = BitSet::new(self.n);
        for u in k..self.n {
            within.insert(u);
        }
        let b = self.packer.pack(&within);
        self.suffix_bound[k] = Some(b);
        b
    }

    /// Assigns vertex `k`; `cost` covers all pairs among `0..k`.
    fn descend(&mut self, k: Vertex, cost: u64) -> Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if k == self.n {
            if cost < self.limit {
                self.limit = cost;
                self.best = Some((cost, self.assignment.clone()));
            }
            return Ok(());
        }
        let m = self.sizes.len();
        let children = self.child_bounds(k, cost);
        let only = self.forced.get(k).copied();
        for (j, (delta, bound)) in children.into_iter().enumerate() {
            if self.done() {
                return Ok(());
            }
            if only.is_some_and(|f| f != j) || bound >= self.limit {
                continue;
            }
            self.assign(k, j, m);
            let r = self.descend(k + 1, cost + delta);
            self.unassign(k, j, m);
            r?;
        }
        Ok(())
    }

    /// `(delta, lower bound)` for placing `k` in each cluster `0..m`, then in
    /// a fresh cluster.
    fn child_bounds(&mut self, k: Vertex, cost: u64) -> Vec<(u64, u64)> {
        let m = self.sizes.len();
        let n = self.n;
        let mut deltas = Vec::with_capacity(m + 1);
        for j in 0..m {
            let t = self.sizes[j] - 2 * self.plus_to[k][j];
            deltas.push((t + self.plus_assigned[k]) as u64);
        }
        deltas.push(self.plus_assigned[k] as u64);

        // sum over future vertices of their cheapest attachment, per child
        let mut future = vec![0i64; m + 1];
        for u in k + 1..n {
            let x = self.g.is_plus(u, k) as i64;
            let row = &self.plus_to[u];
            let mut m1 = 0i64; // fresh cluster option
            let mut m1_at = usize::MAX;
            let mut m2 = 0i64;
            for j in 0..m {
                let t = self.sizes[j] - 2 * row[j];
                if t < m1 {
                    m2 = m1;
                    m1 = t;
                    m1_at = j;
                } else if t < m2 {
                    m2 = t;
                }
            }
            let base = self.plus_assigned[u] + x;
            for (j, f) in future.iter_mut().enumerate().take(m) {
                let t_new = self.sizes[j] - 2 * row[j] + 1 - 2 * x;
                let others = if j == m1_at { m2 } else { m1 };
                *f += base + others.min(t_new);
            }
            future[m] += base + m1.min(1 - 2 * x);
        }
        let rest = self.rest_bound(k + 1);
        deltas
            .into_iter()
            .zip(future)
            .map(|(d, f)| (d, cost + d + f as u64 + rest))
            .collect()
    }

    fn assign(&mut self, k: Vertex, j: usize, m: usize) {
        if j == m {
            self.sizes.push(0);
        }
        self.sizes[j] += 1;
        self.assignment[k] = j;
        for u in self.g.plus_neighbors(k).iter().filter(|&u| u > k) {
            self.plus_to[u][j] += 1;
            self.plus_assigned[u] += 1;
        }
    }

    fn unassign(&mut self, k: Vertex, j: usize, m: usize) {
        for u in self.g.plus_neighbors(k).iter().filter(|&u| u > k) {
            self.plus_to[u][j] -= 1;
            self.plus_assigned[u] -= 1;
        }
        self.sizes[j] -= 1;
        if j == m {
            self.sizes.pop();
        }
    }
}
