//! Same-cluster oracles with query accounting.
//!
//! An oracle answers "are `u` and `v` in the same cluster?" for some fixed
//! reference clustering. Every call to [`Oracle::same_cluster`] counts as one
//! query, including repeats; callers that want to avoid paying twice cache the
//! answers themselves.

use crate::exact::{self, ExactConfig, ExactError};
use crate::graph::{Clustering, SignedGraph, Vertex};
use crate::rng::{stream_rng_at, Stream};
use rand::Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("query on identical vertices ({0}, {0})")]
    SameVertex(Vertex),
    #[error("vertex {vertex} out of range for oracle over {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("oracle covers {oracle} vertices but graph has {graph}")]
    DomainMismatch { oracle: usize, graph: usize },
    #[error("votes must be odd and positive, got {0}")]
    EvenVotes(u32),
    #[error("error rate must lie in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("external oracle failed: {0}")]
    External(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub trait Oracle {
    /// Number of vertices the oracle can answer about.
    fn domain(&self) -> usize;

    /// Whether the oracle's clustering puts `u` and `v` together. Counts one
    /// query.
    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError>;

    /// Total queries issued so far.
    fn queries(&self) -> u64;
}

impl<O: Oracle + ?Sized> Oracle for &mut O {
    fn domain(&self) -> usize {
        (**self).domain()
    }

    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError> {
        (**self).same_cluster(u, v)
    }

    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn domain(&self) -> usize {
        (**self).domain()
    }

    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError> {
        (**self).same_cluster(u, v)
    }

    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

pub(crate) fn check_query(n: usize, u: Vertex, v: Vertex) -> Result<(), OracleError> {
    for w in [u, v] {
        if w >= n {
            return Err(OracleError::VertexOutOfRange { vertex: w, n });
        }
    }
    if u == v {
        return Err(OracleError::SameVertex(u));
    }
    Ok(())
}

/// True iff the oracle's clustering disagrees with the label of `{u, v}`.
/// Issues exactly one query.
pub fn opt_makes_mistake<O: Oracle + ?Sized>(
    oracle: &mut O,
    g: &SignedGraph,
    u: Vertex,
    v: Vertex,
) -> Result<bool, OracleError> {
    if oracle.domain() != g.n() {
        return Err(OracleError::DomainMismatch {
            oracle: oracle.domain(),
            graph: g.n(),
        });
    }
    let together = oracle.same_cluster(u, v)?;
    Ok(together != g.is_plus(u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Backed by an optimal clustering of the input graph.
    Optimal,
    /// Backed by a known reference clustering.
    GroundTruth,
}

/// Deterministic oracle answering from one fixed clustering.
#[derive(Debug, Clone)]
pub struct ClusteringOracle {
    backing: Clustering,
    kind: OracleKind,
    queries: u64,
}

impl ClusteringOracle {
    pub fn new(backing: Clustering, kind: OracleKind) -> Self {
        ClusteringOracle {
            backing,
            kind,
            queries: 0,
        }
    }

    pub fn backing(&self) -> &Clustering {
        &self.backing
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }
}

impl Oracle for ClusteringOracle {
    fn domain(&self) -> usize {
        self.backing.n()
    }

    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError> {
        check_query(self.backing.n(), u, v)?;
        self.queries += 1;
        Ok(self.backing.same_cluster(u, v))
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

/// Oracle backed by the exact solver's distinguished optimum.
pub fn make_optimal_oracle(
    g: &SignedGraph,
    config: &ExactConfig,
) -> Result<ClusteringOracle, OracleError> {
    let result = exact::solve_exact(g, config)?;
    Ok(ClusteringOracle::new(
        result.clustering,
        OracleKind::Optimal,
    ))
}

pub fn make_truth_oracle(c: Clustering) -> ClusteringOracle {
    ClusteringOracle::new(c, OracleKind::GroundTruth)
}

/// Parameters of a simulated crowd.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyOracleSpec {
    pub base: Clustering,
    /// Probability that a single annotator answer is flipped.
    pub per_answer_error_rate: f64,
    /// Annotators per pair; odd.
    pub votes: u32,
    pub seed: u64,
}

/// Crowd oracle: each pair is answered once by `votes` independent annotators
/// and the majority is memoized.
///
/// The answer for a pair depends only on `(base, rate, votes, seed, pair)`, not
/// on the order in which pairs are asked.
#[derive(Debug, Clone)]
pub struct NoisyOracle {
    spec: NoisyOracleSpec,
    answers: HashMap<(Vertex, Vertex), bool>,
    queries: u64,
}

impl NoisyOracle {
    pub fn new(spec: NoisyOracleSpec) -> Result<Self, OracleError> {
        if spec.votes.is_multiple_of(2) {
            return Err(OracleError::EvenVotes(spec.votes));
        }
        if !(0.0..=1.0).contains(&spec.per_answer_error_rate) {
            return Err(OracleError::InvalidRate(spec.per_answer_error_rate));
        }
        Ok(NoisyOracle {
            spec,
            answers: HashMap::new(),
            queries: 0,
        })
    }

    pub fn spec(&self) -> &NoisyOracleSpec {
        &self.spec
    }

    fn crowd_answer(&self, u: Vertex, v: Vertex) -> bool {
        let n = self.spec.base.n() as u64;
        let pair = u as u64 * n + v as u64;
        let mut rng = stream_rng_at(self.spec.seed, Stream::Crowd as u64 + pair);
        let truth = self.spec.base.same_cluster(u, v);
        let mut yes = 0;
        for _ in 0..self.spec.votes {
            let flipped = rng.random::<f64>() < self.spec.per_answer_error_rate;
            if truth != flipped {
                yes += 1;
            }
        }
        2 * yes > self.spec.votes
    }
}

impl Oracle for NoisyOracle {
    fn domain(&self) -> usize {
        self.spec.base.n()
    }

    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError> {
        check_query(self.domain(), u, v)?;
        self.queries += 1;
        let key = (u.min(v), u.max(v));
        if let Some(&answer) = self.answers.get(&key) {
            return Ok(answer);
        }
        let answer = self.crowd_answer(key.0, key.1);
        self.answers.insert(key, answer);
        Ok(answer)
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

/// Any same-cluster answer source, dispatched at runtime.
#[derive(Debug, Clone)]
pub enum AnyOracle {
    Clustering(ClusteringOracle),
    Noisy(NoisyOracle),
}

impl Oracle for AnyOracle {
    fn domain(&self) -> usize {
        match self {
            AnyOracle::Clustering(o) => o.domain(),
            AnyOracle::Noisy(o) => o.domain(),
        }
    }

    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError> {
        match self {
            AnyOracle::Clustering(o) => o.same_cluster(u, v),
            AnyOracle::Noisy(o) => o.same_cluster(u, v),
        }
    }

    fn queries(&self) -> u64 {
        match self {
            AnyOracle::Clustering(o) => o.queries(),
            AnyOracle::Noisy(o) => o.queries(),
        }
    }
}
