//! Signed complete graphs, clusterings, and the disagreement objective.
//!
//! Only the `+` adjacency is stored; every pair not joined by a `+` edge is a
//! `-` edge. Vertex IDs are dense indices in `0..n`.

use crate::bitset::BitSet;
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("clustering covers {clustering} vertices but graph has {graph}")]
    SizeMismatch { graph: usize, clustering: usize },
    #[error("pivot {0} is not in the active vertex set")]
    PivotInactive(Vertex),
}

/// Edge label of an unordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

/// Complete graph with a `+`/`-` label on every unordered pair.
#[derive(Clone, PartialEq, Eq)]
pub struct SignedGraph {
    plus: Vec<BitSet>,
    plus_edges: usize,
}

impl SignedGraph {
    /// Builds a graph whose `+` edges are exactly `plus_edges`; duplicates
    /// (in either orientation) collapse.
    pub fn new<I>(n: usize, plus_edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Self::empty(n);
        for (u, v) in plus_edges {
            g.check_pair(u, v)?;
            g.set_plus(u, v);
        }
        Ok(g)
    }

    /// `n` vertices, every pair `-`.
    pub fn empty(n: usize) -> Self {
        SignedGraph {
            plus: (0..n).map(|_| BitSet::new(n)).collect(),
            plus_edges: 0,
        }
    }

    /// `n` vertices, every pair `+`.
    pub fn complete(n: usize) -> Self {
        let mut plus: Vec<BitSet> = (0..n).map(|_| BitSet::full(n)).collect();
        for (u, row) in plus.iter_mut().enumerate() {
            row.remove(u);
        }
        SignedGraph {
            plus,
            plus_edges: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.plus.len()
    }

    /// `|E⁺|`.
    pub fn plus_edge_count(&self) -> usize {
        self.plus_edges
    }

    pub fn pair_count(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1) / 2
    }

    pub(crate) fn check_pair(&self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        let n = self.n();
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::VertexOutOfRange { vertex: w, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    #[inline]
    pub fn is_plus(&self, u: Vertex, v: Vertex) -> bool {
        self.plus[u].contains(v)
    }

    #[inline]
    pub fn sign(&self, u: Vertex, v: Vertex) -> Sign {
        if self.is_plus(u, v) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// `N⁺(u)` as a bit set.
    pub fn plus_neighbors(&self, u: Vertex) -> &BitSet {
        &self.plus[u]
    }

    pub fn plus_degree(&self, u: Vertex) -> usize {
        self.plus[u].count()
    }

    pub(crate) fn set_plus(&mut self, u: Vertex, v: Vertex) {
        if self.plus[u].insert(v) {
            self.plus[v].insert(u);
            self.plus_edges += 1;
        }
    }

    pub(crate) fn set_minus(&mut self, u: Vertex, v: Vertex) {
        if self.plus[u].remove(v) {
            self.plus[v].remove(u);
            self.plus_edges -= 1;
        }
    }

    /// Flips the label of `{u, v}`.
    pub fn flip(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        if self.is_plus(u, v) {
            self.set_minus(u, v);
        } else {
            self.set_plus(u, v);
        }
        Ok(())
    }

    /// `+` edges as `(u, v)` with `u < v`, ascending.
    pub fn plus_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.plus
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Enumerates the `(+,+,-)` triangles that contain `pivot` and whose
    /// other two vertices lie in `active`, ordered by ascending `(v, w)`.
    pub fn ppm_triangles(
        &self,
        pivot: Vertex,
        active: &BitSet,
    ) -> Result<Vec<Triangle>, GraphError> {
        if pivot >= self.n() {
            return Err(GraphError::VertexOutOfRange {
                vertex: pivot,
                n: self.n(),
            });
        }
        if !active.contains(pivot) {
            return Err(GraphError::PivotInactive(pivot));
        }
        let mut out = Vec::new();
        let pivot_row = &self.plus[pivot];
        for v in pivot_row.iter().filter(|&v| active.contains(v)) {
            for w in active.iter() {
                if w == pivot || w == v {
                    continue;
                }
                if pivot_row.contains(w) {
                    // apex case: both pivot edges +, opposite edge must be -
                    if w > v && !self.is_plus(v, w) {
                        out.push(Triangle {
                            pivot,
                            v,
                            w,
                            shape: TriangleShape::PlusPlus,
                        });
                    }
                } else if self.is_plus(v, w) {
                    // {pivot, w} is -, {v, w} is +
                    let (a, b, shape) = if v < w {
                        (v, w, TriangleShape::PlusMinus)
                    } else {
                        (w, v, TriangleShape::MinusPlus)
                    };
                    out.push(Triangle {
                        pivot,
                        v: a,
                        w: b,
                        shape,
                    });
                }
            }
        }
        out.sort_unstable_by_key(|t| (t.v, t.w));
        Ok(out)
    }

    /// True if `{u, v}` lies in at least one `(+,+,-)` triangle of the graph.
    pub fn edge_in_ppm_triangle(&self, u: Vertex, v: Vertex) -> bool {
        (0..self.n()).filter(|&w| w != u && w != v).any(|w| {
            let plus =
                self.is_plus(u, v) as u8 + self.is_plus(u, w) as u8 + self.is_plus(v, w) as u8;
            plus == 2
        })
    }
}

impl std::fmt::Debug for SignedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SignedGraph")
            .field("n", &self.n())
            .field("plus_edges", &self.plus_edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Which pivot edges of a `(+,+,-)` triangle are `+`: the labels of
/// `{pivot, v}` and `{pivot, w}` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleShape {
    /// Pivot is the apex; `{v, w}` is the `-` edge.
    PlusPlus,
    /// `{pivot, v}` is `+`, `{pivot, w}` is `-`.
    PlusMinus,
    /// `{pivot, v}` is `-`, `{pivot, w}` is `+`.
    MinusPlus,
}

/// A `(+,+,-)` triangle anchored at a pivot, with `v < w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub pivot: Vertex,
    pub v: Vertex,
    pub w: Vertex,
    pub shape: TriangleShape,
}

impl Triangle {
    pub fn sign_v(&self) -> Sign {
        match self.shape {
            TriangleShape::PlusPlus | TriangleShape::PlusMinus => Sign::Plus,
            TriangleShape::MinusPlus => Sign::Minus,
        }
    }

    pub fn sign_w(&self) -> Sign {
        match self.shape {
            TriangleShape::PlusPlus | TriangleShape::MinusPlus => Sign::Plus,
            TriangleShape::PlusMinus => Sign::Minus,
        }
    }
}

/// Total assignment of vertices to cluster IDs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    assignment: Vec<usize>,
}

impl Clustering {
    pub fn from_assignment(assignment: Vec<usize>) -> Self {
        Clustering { assignment }
    }

    /// Builds a clustering of `n` vertices from explicit clusters. Every vertex
    /// must appear in exactly one cluster.
    pub fn from_clusters(n: usize, clusters: &[Vec<Vertex>]) -> Result<Self, GraphError> {
        let mut assignment = vec![usize::MAX; n];
        for (id, cluster) in clusters.iter().enumerate() {
            for &v in cluster {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
                if assignment[v] != usize::MAX {
                    return Err(GraphError::SizeMismatch {
                        graph: n,
                        clustering: clusters.iter().map(Vec::len).sum(),
                    });
                }
                assignment[v] = id;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(GraphError::SizeMismatch {
                graph: n,
                clustering: clusters.iter().map(Vec::len).sum(),
            });
        }
        Ok(Clustering { assignment })
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            assignment: (0..n).collect(),
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Clustering {
            assignment: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, v: Vertex) -> usize {
        self.assignment[v]
    }

    pub fn same_cluster(&self, u: Vertex, v: Vertex) -> bool {
        self.assignment[u] == self.assignment[v]
    }

    /// Relabels cluster IDs by order of first appearance.
    pub fn canonicalize(&self) -> Clustering {
        let mut relabel = std::collections::HashMap::new();
        let assignment = self
            .assignment
            .iter()
            .map(|&id| {
                let next = relabel.len();
                *relabel.entry(id).or_insert(next)
            })
            .collect();
        Clustering { assignment }
    }

    pub fn is_canonical(&self) -> bool {
        let mut next = 0;
        for &id in &self.assignment {
            if id > next {
                return false;
            }
            if id == next {
                next += 1;
            }
        }
        true
    }

    /// Partition equality, ignoring cluster IDs.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        self.n() == other.n() && self.canonicalize() == other.canonicalize()
    }

    /// Clusters in order of first appearance, members ascending.
    pub fn clusters(&self) -> Vec<Vec<Vertex>> {
        let canon = self.canonicalize();
        let k = canon.cluster_count();
        let mut out = vec![Vec::new(); k];
        for (v, &id) in canon.assignment.iter().enumerate() {
            out[id].push(v);
        }
        out
    }

    pub fn cluster_count(&self) -> usize {
        let mut ids: Vec<usize> = self.assignment.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Number of pairs co-clustered in exactly one of the two clusterings.
    pub fn pair_distance(&self, other: &Clustering) -> Result<u64, GraphError> {
        if self.n() != other.n() {
            return Err(GraphError::SizeMismatch {
                graph: self.n(),
                clustering: other.n(),
            });
        }
        let n = self.n();
        let mut d = 0;
        for u in 0..n {
            for v in u + 1..n {
                if self.same_cluster(u, v) != other.same_cluster(u, v) {
                    d += 1;
                }
            }
        }
        Ok(d)
    }

    /// The graph whose `+` edges are exactly the intra-cluster pairs.
    pub fn to_graph(&self) -> SignedGraph {
        let mut g = SignedGraph::empty(self.n());
        for cluster in self.clusters() {
            for (i, &u) in cluster.iter().enumerate() {
                for &v in &cluster[i + 1..] {
                    g.set_plus(u, v);
                }
            }
        }
        g
    }
}

/// `|{- edges inside a cluster}| + |{+ edges across clusters}|`.
pub fn count_disagreements(g: &SignedGraph, c: &Clustering) -> Result<u64, GraphError> {
    let n = g.n();
    if c.n() != n {
        return Err(GraphError::SizeMismatch {
            graph: n,
            clustering: c.n(),
        });
    }
    let canon = c.canonicalize();
    let mut members: Vec<BitSet> = Vec::new();
    for (v, &id) in canon.assignment().iter().enumerate() {
        if id == members.len() {
            members.push(BitSet::new(n));
        }
        members[id].insert(v);
    }
    // each intra-cluster + edge is seen from both endpoints
    let intra_plus_twice: usize = (0..n)
        .map(|v| {
            g.plus_neighbors(v)
                .intersection_count(&members[canon.cluster_of(v)])
        })
        .sum();
    let intra_plus = intra_plus_twice / 2;
    let intra_pairs: usize = members
        .iter()
        .map(|m| {
            let s = m.count();
            s * s.saturating_sub(1) / 2
        })
        .sum();
    let intra_minus = intra_pairs - intra_plus;
    let inter_plus = g.plus_edge_count() - intra_plus;
    Ok((intra_minus + inter_plus) as u64)
}

/// `enumerate_ppm_triangles` over every pivot of `active`.
pub fn ppm_triangles_all(g: &SignedGraph, active: &BitSet) -> Vec<Triangle> {
    active
        .iter()
        .flat_map(|p| g.ppm_triangles(p, active).expect("pivot is active"))
        .collect()
}
