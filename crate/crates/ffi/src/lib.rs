//! C ABI for the rumor-source detection library.
//!
//! Handles are opaque pointers created and destroyed by this library;
//! every fallible call returns an [`RqStatus`] and writes its result
//! through out-pointers. All functions are safe to call from any thread
//! as long as each handle is used from one thread at a time.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rumorq::diffusion::{pick_random_source, simulate_si, DiffusionSnapshot};
use rumorq::estimators::{
    idq, idq_mle_baseline, no_query_baseline, sbq, sbq_mle_baseline, EstimationResult,
};
use rumorq::querying::TruthModel;
use rumorq::{Error, Graph, LazyRegularTree, NodeId};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    SimulationFailed = 4,
    EstimationFailed = 5,
    Panic = 6,
}

/// Estimator selector for [`rq_estimate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RqEstimator {
    NoQuery = 0,
    Sbq = 1,
    SbqMle = 2,
    Idq = 3,
    IdqMle = 4,
}

/// Opaque immutable graph handle.
pub struct RqGraph {
    inner: Arc<Graph>,
}

/// Opaque diffusion-snapshot handle.
pub struct RqSnapshot {
    inner: DiffusionSnapshot,
}

/// Result of one estimation run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RqEstimate {
    /// Estimated source node id.
    pub estimate: u32,
    /// Questions actually spent.
    pub budget_spent: u64,
    /// 1 when the estimate equals the snapshot's true source.
    pub hit: u8,
}

fn status_of(err: &Error) -> RqStatus {
    match err {
        Error::Io(_) => RqStatus::Io,
        Error::ComponentExhausted { .. } => RqStatus::SimulationFailed,
        Error::NotATree
        | Error::LoopySnapshot
        | Error::BudgetTooSmall { .. }
        | Error::DirectionAtSource => RqStatus::EstimationFailed,
        _ => RqStatus::InvalidArgument,
    }
}

/// Human-readable name of a status code; never null, statically
/// allocated, not to be freed.
#[no_mangle]
pub extern "C" fn rq_status_name(status: RqStatus) -> *const std::os::raw::c_char {
    let name: &'static [u8] = match status {
        RqStatus::Ok => b"ok\0",
        RqStatus::NullPointer => b"null pointer\0",
        RqStatus::InvalidArgument => b"invalid argument\0",
        RqStatus::Io => b"io error\0",
        RqStatus::SimulationFailed => b"simulation failed\0",
        RqStatus::EstimationFailed => b"estimation failed\0",
        RqStatus::Panic => b"internal panic\0",
    };
    name.as_ptr() as *const std::os::raw::c_char
}

fn guarded<F: FnOnce() -> RqStatus>(f: F) -> RqStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(RqStatus::Panic)
}

unsafe fn write_graph(out: *mut *mut RqGraph, graph: Graph) -> RqStatus {
    *out = Box::into_raw(Box::new(RqGraph {
        inner: Arc::new(graph),
    }));
    RqStatus::Ok
}

/// Builds the ball of `hops` hops around the root of a d-regular tree.
///
/// # Safety
/// `out` must be a valid pointer to an `RqGraph*` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_regular_tree_ball(
    degree: u32,
    hops: u32,
    out: *mut *mut RqGraph,
) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    guarded(|| match LazyRegularTree::new(degree) {
        Ok(mut tree) => {
            tree.materialize_ball(hops);
            write_graph(out, tree.freeze())
        }
        Err(e) => status_of(&e),
    })
}

/// Largest component of an Erdos-Renyi graph with the given mean degree.
///
/// # Safety
/// `out` must be a valid pointer to an `RqGraph*` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_er(
    n: usize,
    avg_degree: f64,
    seed: u64,
    out: *mut *mut RqGraph,
) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    guarded(|| match rumorq::graph::gen_er(n, avg_degree, seed) {
        Ok(g) => write_graph(out, g),
        Err(e) => status_of(&e),
    })
}

/// Preferential-attachment scale-free graph with the given edge/node
/// ratio.
///
/// # Safety
/// `out` must be a valid pointer to an `RqGraph*` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_scale_free(
    n: usize,
    ratio: f64,
    seed: u64,
    out: *mut *mut RqGraph,
) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    guarded(|| match rumorq::graph::gen_scale_free(n, ratio, seed) {
        Ok(g) => write_graph(out, g),
        Err(e) => status_of(&e),
    })
}

/// Loads a whitespace-separated edge list (`#` comments allowed) from a
/// NUL-terminated UTF-8 path.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to an `RqGraph*` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_load_edge_list(
    path: *const std::os::raw::c_char,
    out: *mut *mut RqGraph,
) -> RqStatus {
    if path.is_null() || out.is_null() {
        return RqStatus::NullPointer;
    }
    let path = match std::ffi::CStr::from_ptr(path).to_str() {
        Ok(s) => s.to_owned(),
        Err(_) => return RqStatus::InvalidArgument,
    };
    guarded(|| {
        let file = match std::fs::File::open(&path) {
            Ok(f) => f,
            Err(_) => return RqStatus::Io,
        };
        match rumorq::graph::load_edge_list(std::io::BufReader::new(file)) {
            Ok((g, _)) => write_graph(out, g),
            Err(e) => status_of(&e),
        }
    })
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_node_count(graph: *const RqGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.node_count())
}

/// Number of undirected edges; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_edge_count(graph: *const RqGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Frees a graph handle; null is a no-op.
///
/// # Safety
/// `graph` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn rq_graph_free(graph: *mut RqGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Simulates SI diffusion on an unbounded d-regular tree from its root
/// until `n_infected` nodes hold the rumor.
///
/// # Safety
/// `out` must be a valid pointer to an `RqSnapshot*` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_simulate_regular_tree(
    degree: u32,
    n_infected: usize,
    seed: u64,
    out: *mut *mut RqSnapshot,
) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    guarded(|| {
        let tree = match LazyRegularTree::new(degree) {
            Ok(t) => t,
            Err(e) => return status_of(&e),
        };
        match simulate_si(tree, NodeId(0), n_infected, seed) {
            Ok(snap) => {
                *out = Box::into_raw(Box::new(RqSnapshot { inner: snap }));
                RqStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Simulates SI diffusion on a graph handle. A negative `source` picks a
/// uniformly random source from the seed.
///
/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer to an
/// `RqSnapshot*` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_simulate_on_graph(
    graph: *const RqGraph,
    source: i64,
    n_infected: usize,
    seed: u64,
    out: *mut *mut RqSnapshot,
) -> RqStatus {
    if graph.is_null() || out.is_null() {
        return RqStatus::NullPointer;
    }
    let g = Arc::clone(&(*graph).inner);
    guarded(|| {
        let source = if source < 0 {
            pick_random_source(&g, seed)
        } else if (source as usize) < g.node_count() {
            NodeId(source as u32)
        } else {
            return RqStatus::InvalidArgument;
        };
        match simulate_si(g, source, n_infected, seed) {
            Ok(snap) => {
                *out = Box::into_raw(Box::new(RqSnapshot { inner: snap }));
                RqStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// True source node id of a snapshot; `u32::MAX` for a null handle.
///
/// # Safety
/// `snapshot` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rq_snapshot_source(snapshot: *const RqSnapshot) -> u32 {
    snapshot.as_ref().map_or(u32::MAX, |s| s.inner.source().0)
}

/// Number of infected nodes; 0 for a null handle.
///
/// # Safety
/// `snapshot` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rq_snapshot_infected_count(snapshot: *const RqSnapshot) -> usize {
    snapshot.as_ref().map_or(0, |s| s.inner.infected_count())
}

/// Frees a snapshot handle; null is a no-op.
///
/// # Safety
/// `snapshot` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn rq_snapshot_free(snapshot: *mut RqSnapshot) {
    if !snapshot.is_null() {
        drop(Box::from_raw(snapshot));
    }
}

/// Runs one estimator on a snapshot. `r = 0` selects the closed-form
/// optimal repetition count; `p`/`q` are the identity/direction truth
/// probabilities and `d` the reference degree.
///
/// # Safety
/// `snapshot` must be a live handle; `out` must be a valid pointer to an
/// `RqEstimate` slot.
#[no_mangle]
pub unsafe extern "C" fn rq_estimate(
    snapshot: *const RqSnapshot,
    estimator: RqEstimator,
    p: f64,
    q: f64,
    d: u32,
    k_budget: u64,
    r: u32,
    seed: u64,
    out: *mut RqEstimate,
) -> RqStatus {
    if snapshot.is_null() || out.is_null() {
        return RqStatus::NullPointer;
    }
    let snap = &(*snapshot).inner;
    guarded(|| {
        let model = match TruthModel::new(p, q, d) {
            Ok(m) => m,
            Err(e) => return status_of(&e),
        };
        let r_opt = if r == 0 { None } else { Some(r) };
        let fixed_r = |fallback: u32| if r == 0 { fallback } else { r };
        let result: rumorq::Result<EstimationResult> = match estimator {
            RqEstimator::NoQuery => Ok(no_query_baseline(snap, seed)),
            RqEstimator::Sbq => sbq(snap, &model, k_budget, r_opt, seed),
            RqEstimator::SbqMle => sbq_mle_baseline(
                snap,
                &model,
                k_budget,
                fixed_r(rumorq::estimators::r_star_batch(k_budget, p, d)),
                seed,
            ),
            RqEstimator::Idq => idq(snap, &model, k_budget, r_opt, seed),
            RqEstimator::IdqMle => idq_mle_baseline(
                snap,
                &model,
                k_budget,
                fixed_r(rumorq::estimators::r_star_interactive(k_budget, q, d)),
                seed,
            ),
        };
        match result {
            Ok(res) => {
                *out = RqEstimate {
                    estimate: res.estimate.0,
                    budget_spent: res.budget_spent,
                    hit: (res.estimate == snap.source()) as u8,
                };
                RqStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Sufficient batch-querying budget for failure probability `delta`;
/// writes NaN-free output only on `Ok`.
///
/// # Safety
/// `out` must be a valid pointer to a double slot.
#[no_mangle]
pub unsafe extern "C" fn rq_budget_bound_batch(
    delta: f64,
    p: f64,
    d: u32,
    out: *mut f64,
) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    match rumorq::bounds::budget_bound_batch(delta, p, d) {
        Ok(v) => {
            *out = v;
            RqStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Sufficient interactive-querying budget for failure probability
/// `delta`.
///
/// # Safety
/// `out` must be a valid pointer to a double slot.
#[no_mangle]
pub unsafe extern "C" fn rq_budget_bound_interactive(
    delta: f64,
    q: f64,
    d: u32,
    out: *mut f64,
) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    match rumorq::bounds::budget_bound_interactive(delta, q, d) {
        Ok(v) => {
            *out = v;
            RqStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Regularized incomplete beta function I_x(a, b).
///
/// # Safety
/// `out` must be a valid pointer to a double slot.
#[no_mangle]
pub unsafe extern "C" fn rq_reg_inc_beta(x: f64, a: f64, b: f64, out: *mut f64) -> RqStatus {
    if out.is_null() {
        return RqStatus::NullPointer;
    }
    match rumorq::bounds::reg_inc_beta(x, a, b) {
        Ok(v) => {
            *out = v;
            RqStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Probability that a p-truthful source survives the majority filter
/// after r repetitions.
#[no_mangle]
pub extern "C" fn rq_majority_success_prob(p: f64, r: u32) -> f64 {
    rumorq::bounds::majority_success_prob(p, r)
}
