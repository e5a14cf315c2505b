//! Pivot algorithms for correlation clustering.
//!
//! All three algorithms share one loop: pick a pivot among the unclustered
//! vertices, decide which of the pivot's incident edges to "make a mistake
//! on", form the pivot's cluster from that decision, and repeat on the rest.
//! They differ in how pivots are chosen and how `(+,+,-)` triangles around
//! the pivot are handled:
//!
//! * [`query_pivot`] takes the lowest remaining vertex and resolves every
//!   triangle with at most two queries, recovering the oracle's clustering
//!   when the oracle is optimal.
//! * [`random_query_pivot`] takes a uniformly random pivot and engages each
//!   triangle only with probability `p`.
//! * [`acn_pivot`] never queries; the cluster is the pivot's `+` neighbourhood.

use crate::bitset::BitSet;
use crate::graph::{
    count_disagreements, Clustering, Sign, SignedGraph, Triangle, TriangleShape, Vertex,
};
use crate::oracle::{Oracle, OracleError};
use crate::rng::{stream_rng, Stream};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgorithmError {
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("oracle covers {oracle} vertices but graph has {graph}")]
    DomainMismatch { oracle: usize, graph: usize },
    #[error("pivot order must be a permutation of 0..{0}")]
    InvalidOrder(usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub clustering: Clustering,
    /// Oracle calls issued during the run.
    pub queries: u64,
    /// Disagreements of `clustering` against the input graph.
    pub mistakes: u64,
    pub seed: Option<u64>,
    pub parameter_p: Option<f64>,
}

/// What happened to one `(+,+,-)` triangle while its pivot was active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleRecord {
    /// Index of the pivot step (0 for the first cluster formed).
    pub step: usize,
    pub triangle: Triangle,
    pub engaged: bool,
    /// Endpoints `x` such that `{pivot, x}` went to the oracle while handling
    /// this triangle, in query order.
    pub queried: Vec<Vertex>,
    /// Endpoints whose pivot edge was newly marked as a mistake.
    pub new_mistakes: Vec<Vertex>,
}

/// Optional per-run instrumentation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    /// Pivot chosen at each step.
    pub pivots: Vec<Vertex>,
    pub triangles: Vec<TriangleRecord>,
}

enum PivotRule<'a> {
    LowestIndex,
    Priority(&'a [Vertex]),
    Uniform(ChaCha8Rng),
}

impl PivotRule<'_> {
    fn choose(&mut self, active: &BitSet) -> Vertex {
        match self {
            PivotRule::LowestIndex => active.first().expect("active set is non-empty"),
            PivotRule::Priority(order) => *order
                .iter()
                .find(|&&v| active.contains(v))
                .expect("order covers every vertex"),
            PivotRule::Uniform(rng) => {
                let k = rng.random_range(0..active.count());
                active.iter().nth(k).expect("index within active set")
            }
        }
    }
}

enum TrianglePolicy {
    /// Deterministic resolution of every triangle.
    Resolve,
    /// Engage each triangle with probability `p`.
    Random { p: f64, rng: ChaCha8Rng },
    /// Never look at triangles.
    Ignore,
}

/// Per-pivot oracle bookkeeping: the `Queried`/`Mistake` arrays.
struct PivotState<'o, O: ?Sized> {
    oracle: &'o mut O,
    g: &'o SignedGraph,
    pivot: Vertex,
    answer: Vec<Option<bool>>,
    mistake: Vec<bool>,
}

impl<O: Oracle + ?Sized> PivotState<'_, O> {
    fn queried(&self, x: Vertex) -> bool {
        self.answer[x].is_some()
    }

    /// Asks whether OPT errs on `{pivot, x}`; each edge goes to the oracle at
    /// most once per pivot. Records the answer as the mistake flag.
    fn ask(&mut self, x: Vertex, record: &mut TriangleRecord) -> Result<bool, OracleError> {
        let errs = match self.answer[x] {
            Some(a) => a,
            None => {
                let together = self.oracle.same_cluster(self.pivot, x)?;
                let errs = together != self.g.is_plus(self.pivot, x);
                self.answer[x] = Some(errs);
                record.queried.push(x);
                errs
            }
        };
        if errs && !self.mistake[x] {
            self.mistake[x] = true;
            record.new_mistakes.push(x);
        }
        Ok(errs)
    }
}

fn run_pivots<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
    mut rule: PivotRule<'_>,
    mut policy: TrianglePolicy,
    mut trace: Option<&mut Trace>,
) -> Result<(Clustering, u64), AlgorithmError> {
    let n = g.n();
    if oracle.domain() != n {
        return Err(AlgorithmError::DomainMismatch {
            oracle: oracle.domain(),
            graph: n,
        });
    }
    let start = oracle.queries();
    let mut active = BitSet::full(n);
    let mut assignment = vec![usize::MAX; n];
    let mut step = 0;
    while !active.is_empty() {
        let pivot = rule.choose(&active);
        if let Some(t) = trace.as_deref_mut() {
            t.pivots.push(pivot);
        }
        let mut state = PivotState {
            oracle: &mut *oracle,
            g,
            pivot,
            answer: vec![None; n],
            mistake: vec![false; n],
        };
        if !matches!(policy, TrianglePolicy::Ignore) {
            for tri in g.ppm_triangles(pivot, &active).expect("pivot is active") {
                let mut record = TriangleRecord {
                    step,
                    triangle: tri,
                    engaged: false,
                    queried: Vec::new(),
                    new_mistakes: Vec::new(),
                };
                match &mut policy {
                    TrianglePolicy::Resolve => resolve_triangle(&mut state, &tri, &mut record)?,
                    TrianglePolicy::Random { p, rng } => {
                        let r: f64 = rng.random();
                        if r < *p {
                            engage_triangle(&mut state, &tri, &mut record)?;
                        }
                    }
                    TrianglePolicy::Ignore => unreachable!(),
                }
                if let Some(t) = trace.as_deref_mut() {
                    t.triangles.push(record);
                }
            }
        }
        let mistake = state.mistake;
        for v in active.iter() {
            let joins = v == pivot || g.is_plus(pivot, v) != mistake[v];
            if joins {
                assignment[v] = step;
            }
        }
        for v in 0..n {
            if assignment[v] == step {
                active.remove(v);
            }
        }
        step += 1;
    }
    let queries = oracle.queries() - start;
    Ok((
        Clustering::from_assignment(assignment).canonicalize(),
        queries,
    ))
}

/// Deterministic handling: skip if a mistake is already known on either pivot
/// edge or both were queried; otherwise query `{pivot, v}`, then `{pivot, w}`
/// unless the first revealed a mistake.
fn resolve_triangle<O: Oracle + ?Sized>(
    state: &mut PivotState<'_, O>,
    tri: &Triangle,
    record: &mut TriangleRecord,
) -> Result<(), OracleError> {
    let (v, w) = (tri.v, tri.w);
    if state.mistake[v] || state.mistake[w] {
        return Ok(());
    }
    if state.queried(v) && state.queried(w) {
        return Ok(());
    }
    record.engaged = true;
    if !state.queried(v) {
        state.ask(v, record)?;
    }
    if !state.queried(w) && !state.mistake[v] {
        state.ask(w, record)?;
    }
    Ok(())
}

/// Randomized handling once the coin says engage: with both pivot edges `+`
/// ask both; otherwise ask the `+` edge and, unless it is a mistake, the `-`
/// edge.
fn engage_triangle<O: Oracle + ?Sized>(
    state: &mut PivotState<'_, O>,
    tri: &Triangle,
    record: &mut TriangleRecord,
) -> Result<(), OracleError> {
    record.engaged = true;
    match tri.shape {
        TriangleShape::PlusPlus => {
            state.ask(tri.v, record)?;
            state.ask(tri.w, record)?;
        }
        TriangleShape::PlusMinus | TriangleShape::MinusPlus => {
            let (plus, minus) = if tri.sign_v() == Sign::Plus {
                (tri.v, tri.w)
            } else {
                (tri.w, tri.v)
            };
            if !state.ask(plus, record)? {
                state.ask(minus, record)?;
            }
        }
    }
    Ok(())
}

fn outcome(
    g: &SignedGraph,
    clustering: Clustering,
    queries: u64,
    seed: Option<u64>,
    parameter_p: Option<f64>,
) -> RunOutcome {
    let mistakes = count_disagreements(g, &clustering).expect("clustering covers the graph");
    RunOutcome {
        clustering,
        queries,
        mistakes,
        seed,
        parameter_p,
    }
}

/// Deterministic query pivot with the lowest remaining vertex as pivot.
pub fn query_pivot<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
) -> Result<RunOutcome, AlgorithmError> {
    let (c, q) = run_pivots(
        g,
        oracle,
        PivotRule::LowestIndex,
        TrianglePolicy::Resolve,
        None,
    )?;
    Ok(outcome(g, c, q, None, None))
}

pub fn query_pivot_traced<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
    trace: &mut Trace,
) -> Result<RunOutcome, AlgorithmError> {
    let (c, q) = run_pivots(
        g,
        oracle,
        PivotRule::LowestIndex,
        TrianglePolicy::Resolve,
        Some(trace),
    )?;
    Ok(outcome(g, c, q, None, None))
}

/// Query pivot where the pivot is the first remaining vertex of `order`,
/// which must be a permutation of `0..n`.
pub fn query_pivot_with_order<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
    order: &[Vertex],
) -> Result<RunOutcome, AlgorithmError> {
    let n = g.n();
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&v| v >= n || std::mem::replace(&mut seen[v], true))
    {
        return Err(AlgorithmError::InvalidOrder(n));
    }
    let (c, q) = run_pivots(
        g,
        oracle,
        PivotRule::Priority(order),
        TrianglePolicy::Resolve,
        None,
    )?;
    Ok(outcome(g, c, q, None, None))
}

fn check_probability(p: f64) -> Result<(), AlgorithmError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(AlgorithmError::InvalidProbability(p))
    }
}

/// Uniformly random pivots; each `(+,+,-)` triangle is engaged with
/// probability `p`. Pivot choice and triangle coins use separate streams of
/// `seed`.
pub fn random_query_pivot<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
    p: f64,
    seed: u64,
) -> Result<RunOutcome, AlgorithmError> {
    random_query_pivot_inner(g, oracle, p, seed, None)
}

pub fn random_query_pivot_traced<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
    p: f64,
    seed: u64,
    trace: &mut Trace,
) -> Result<RunOutcome, AlgorithmError> {
    random_query_pivot_inner(g, oracle, p, seed, Some(trace))
}

fn random_query_pivot_inner<O: Oracle + ?Sized>(
    g: &SignedGraph,
    oracle: &mut O,
    p: f64,
    seed: u64,
    trace: Option<&mut Trace>,
) -> Result<RunOutcome, AlgorithmError> {
    check_probability(p)?;
    let (c, q) = run_pivots(
        g,
        oracle,
        PivotRule::Uniform(stream_rng(seed, Stream::Pivot)),
        TrianglePolicy::Random {
            p,
            rng: stream_rng(seed, Stream::Triangle),
        },
        trace,
    )?;
    Ok(outcome(g, c, q, Some(seed), Some(p)))
}

/// Query-free pivoting: the cluster is the pivot plus its remaining `+`
/// neighbours.
pub fn acn_pivot(g: &SignedGraph, seed: u64) -> RunOutcome {
    let mut none = NoOracle(g.n());
    let (c, _) = run_pivots(
        g,
        &mut none,
        PivotRule::Uniform(stream_rng(seed, Stream::Pivot)),
        TrianglePolicy::Ignore,
        None,
    )
    .expect("query-free run cannot fail");
    outcome(g, c, 0, Some(seed), None)
}

struct NoOracle(usize);

impl Oracle for NoOracle {
    fn domain(&self) -> usize {
        self.0
    }

    fn same_cluster(&mut self, _: Vertex, _: Vertex) -> Result<bool, OracleError> {
        unreachable!("query-free run issued a query")
    }

    fn queries(&self) -> u64 {
        0
    }
}
