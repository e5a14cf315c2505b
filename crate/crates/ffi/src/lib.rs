//! C ABI for the `ccq` library.
//!
//! Graphs and clusterings cross the boundary as opaque handles created by
//! `ccq_*_new`/`ccq_*_read` and released with the matching `ccq_*_free`.
//! Every fallible call returns a [`CcqStatus`]; on failure
//! [`ccq_last_error_message`] describes the most recent error on the calling
//! thread.

use ccq::algorithms::{acn_pivot, query_pivot, random_query_pivot, RunOutcome};
use ccq::datagen;
use ccq::exact::{solve_exact, ExactConfig};
use ccq::oracle::{ClusteringOracle, Oracle, OracleError, OracleKind};
use ccq::{count_disagreements, Clustering, SignedGraph, Vertex};
use std::cell::RefCell;
use std::ffi::{c_char, c_int, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    BudgetExhausted = 5,
    Oracle = 6,
    Panic = 7,
}

/// Opaque signed complete graph.
pub struct CcqGraph(SignedGraph);

/// Opaque clustering (one cluster ID per vertex).
pub struct CcqClustering(Clustering);

/// Same-cluster callback: return 1 for together, 0 for apart, negative to
/// abort the run with [`CcqStatus::Oracle`].
pub type CcqOracleFn = Option<unsafe extern "C" fn(user: *mut c_void, u: usize, v: usize) -> c_int>;

/// Result counters of a pivot run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CcqRunStats {
    pub queries: u64,
    pub mistakes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut message = message.into();
    message.retain(|c| c != '\0');
    let c = CString::new(message).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Most recent error message on this thread, or NULL. The pointer stays valid
/// until the next `ccq_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ccq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

struct Failure(CcqStatus, String);

fn fail<T>(status: CcqStatus, message: impl std::fmt::Display) -> Result<T, Failure> {
    Err(Failure(status, message.to_string()))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CcqStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CcqStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CcqStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(
        || fail(CcqStatus::NullPointer, format!("{what} is NULL")),
        Ok,
    )
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().map_or_else(
        || fail(CcqStatus::NullPointer, format!("{what} is NULL")),
        Ok,
    )
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return fail(CcqStatus::NullPointer, "path is NULL");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(s.to_string()),
        Err(_) => fail(CcqStatus::InvalidArgument, "path is not UTF-8"),
    }
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(CcqStatus::NullPointer, format!("{what} is NULL"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn io_failure(e: datagen::IoError) -> Failure {
    match e {
        datagen::IoError::Io { .. } => Failure(CcqStatus::Io, e.to_string()),
        other => Failure(CcqStatus::Parse, other.to_string()),
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Builds a graph on `n` vertices whose `+` edges are `(us[i], vs[i])`.
///
/// # Safety
/// `us` and `vs` must point to `m` readable values each; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_new(
    n: usize,
    us: *const usize,
    vs: *const usize,
    m: usize,
    out: *mut *mut CcqGraph,
) -> CcqStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let us = slice_arg(us, m, "us")?;
        let vs = slice_arg(vs, m, "vs")?;
        match SignedGraph::new(n, us.iter().copied().zip(vs.iter().copied())) {
            Ok(g) => {
                *out = boxed(CcqGraph(g));
                Ok(())
            }
            Err(e) => fail(CcqStatus::InvalidArgument, e),
        }
    })
}

/// Reads a signed-graph file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_read(path: *const c_char, out: *mut *mut CcqGraph) -> CcqStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = datagen::read_graph(path_arg(path)?).map_err(io_failure)?;
        *out = boxed(CcqGraph(g));
        Ok(())
    })
}

/// Reads a weighted-graph file and rounds it at weight 1/2.
///
/// # Safety
/// As [`ccq_graph_read`].
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_read_weighted(
    path: *const c_char,
    out: *mut *mut CcqGraph,
) -> CcqStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = datagen::read_weighted(path_arg(path)?).map_err(io_failure)?;
        *out = boxed(CcqGraph(g));
        Ok(())
    })
}

/// Writes `g` in the signed-graph file format.
///
/// # Safety
/// `g` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_write(g: *const CcqGraph, path: *const c_char) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        datagen::write_graph(&g.0, path_arg(path)?).map_err(io_failure)
    })
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_vertex_count(g: *const CcqGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Number of `+` edges, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_plus_edge_count(g: *const CcqGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.plus_edge_count())
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccq_graph_free(g: *mut CcqGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds a clustering from one cluster ID per vertex.
///
/// # Safety
/// `assignment` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_clustering_new(
    assignment: *const usize,
    n: usize,
    out: *mut *mut CcqClustering,
) -> CcqStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let a = slice_arg(assignment, n, "assignment")?;
        *out = boxed(CcqClustering(Clustering::from_assignment(a.to_vec())));
        Ok(())
    })
}

/// Reads a clustering file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_clustering_read(
    path: *const c_char,
    out: *mut *mut CcqClustering,
) -> CcqStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let c = datagen::read_clustering(path_arg(path)?).map_err(io_failure)?;
        *out = boxed(CcqClustering(c));
        Ok(())
    })
}

/// Number of vertices covered, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccq_clustering_len(c: *const CcqClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.n())
}

/// Copies the canonical assignment (IDs numbered by first appearance) into
/// `buf`, which must hold `len` values with `len` equal to the clustering's
/// length.
///
/// # Safety
/// `c` must be a live handle and `buf` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn ccq_clustering_assignment(
    c: *const CcqClustering,
    buf: *mut usize,
    len: usize,
) -> CcqStatus {
    guard(|| {
        let c = deref(c, "clustering")?;
        if len != c.0.n() {
            return fail(
                CcqStatus::InvalidArgument,
                format!("buffer holds {len} values, clustering has {}", c.0.n()),
            );
        }
        if len == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return fail(CcqStatus::NullPointer, "buf is NULL");
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        dst.copy_from_slice(c.0.canonicalize().assignment());
        Ok(())
    })
}

/// Releases a clustering. NULL is ignored.
///
/// # Safety
/// `c` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccq_clustering_free(c: *mut CcqClustering) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Disagreements of `c` on `g`.
///
/// # Safety
/// `g` and `c` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_count_disagreements(
    g: *const CcqGraph,
    c: *const CcqClustering,
    out: *mut u64,
) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let c = deref(c, "clustering")?;
        let out = out_ptr(out, "out")?;
        *out = count_disagreements(&g.0, &c.0).or_else(|e| fail(CcqStatus::InvalidArgument, e))?;
        Ok(())
    })
}

/// Optimal clustering of `g` within `node_budget` search nodes (0 selects the
/// default budget). Writes the clustering and its cost.
///
/// # Safety
/// `g` must be a live handle; `out` and `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_solve_exact(
    g: *const CcqGraph,
    node_budget: u64,
    out: *mut *mut CcqClustering,
    cost: *mut u64,
) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let out = out_ptr(out, "out")?;
        let cost = out_ptr(cost, "cost")?;
        let config = if node_budget == 0 {
            ExactConfig::default()
        } else {
            ExactConfig::with_budget(node_budget)
        };
        match solve_exact(&g.0, &config) {
            Ok(r) => {
                *cost = r.cost;
                *out = boxed(CcqClustering(r.clustering));
                Ok(())
            }
            Err(e) => fail(CcqStatus::BudgetExhausted, e),
        }
    })
}

struct CallbackOracle {
    callback: unsafe extern "C" fn(*mut c_void, usize, usize) -> c_int,
    user: *mut c_void,
    n: usize,
    queries: u64,
}

impl Oracle for CallbackOracle {
    fn domain(&self) -> usize {
        self.n
    }

    fn same_cluster(&mut self, u: Vertex, v: Vertex) -> Result<bool, OracleError> {
        self.queries += 1;
        match unsafe { (self.callback)(self.user, u, v) } {
            0 => Ok(false),
            1 => Ok(true),
            code => Err(OracleError::External(format!(
                "callback returned {code} for ({u}, {v})"
            ))),
        }
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

fn finish(
    outcome: Result<RunOutcome, ccq::algorithms::AlgorithmError>,
    out: &mut *mut CcqClustering,
    stats: *mut CcqRunStats,
) -> Result<(), Failure> {
    use ccq::algorithms::AlgorithmError;
    let outcome = outcome.map_err(|e| match e {
        AlgorithmError::Oracle(_) => Failure(CcqStatus::Oracle, e.to_string()),
        other => Failure(CcqStatus::InvalidArgument, other.to_string()),
    })?;
    if let Some(stats) = unsafe { stats.as_mut() } {
        *stats = CcqRunStats {
            queries: outcome.queries,
            mistakes: outcome.mistakes,
        };
    }
    *out = boxed(CcqClustering(outcome.clustering));
    Ok(())
}

/// QueryPivot with a caller-supplied same-cluster callback. `stats` may be
/// NULL.
///
/// # Safety
/// `g` must be a live handle, `callback` safe to call with `user`, and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_query_pivot(
    g: *const CcqGraph,
    callback: CcqOracleFn,
    user: *mut c_void,
    out: *mut *mut CcqClustering,
    stats: *mut CcqRunStats,
) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let out = out_ptr(out, "out")?;
        let Some(callback) = callback else {
            return fail(CcqStatus::NullPointer, "callback is NULL");
        };
        let mut oracle = CallbackOracle {
            callback,
            user,
            n: g.0.n(),
            queries: 0,
        };
        finish(query_pivot(&g.0, &mut oracle), out, stats)
    })
}

fn backing_oracle(c: &CcqClustering) -> ClusteringOracle {
    ClusteringOracle::new(c.0.clone(), OracleKind::GroundTruth)
}

/// QueryPivot answering queries from `backing`. `stats` may be NULL.
///
/// # Safety
/// `g` and `backing` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_query_pivot_clustering(
    g: *const CcqGraph,
    backing: *const CcqClustering,
    out: *mut *mut CcqClustering,
    stats: *mut CcqRunStats,
) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let backing = deref(backing, "backing")?;
        let out = out_ptr(out, "out")?;
        finish(query_pivot(&g.0, &mut backing_oracle(backing)), out, stats)
    })
}

/// RandomQueryPivot(p) answering queries from `backing`. `stats` may be NULL.
///
/// # Safety
/// As [`ccq_query_pivot_clustering`].
#[no_mangle]
pub unsafe extern "C" fn ccq_random_query_pivot(
    g: *const CcqGraph,
    backing: *const CcqClustering,
    p: f64,
    seed: u64,
    out: *mut *mut CcqClustering,
    stats: *mut CcqRunStats,
) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let backing = deref(backing, "backing")?;
        let out = out_ptr(out, "out")?;
        finish(
            random_query_pivot(&g.0, &mut backing_oracle(backing), p, seed),
            out,
            stats,
        )
    })
}

/// Query-free randomized pivot baseline. `stats` may be NULL.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ccq_acn_pivot(
    g: *const CcqGraph,
    seed: u64,
    out: *mut *mut CcqClustering,
    stats: *mut CcqRunStats,
) -> CcqStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let out = out_ptr(out, "out")?;
        finish(Ok(acn_pivot(&g.0, seed)), out, stats)
    })
}
