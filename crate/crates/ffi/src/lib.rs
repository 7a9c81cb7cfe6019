//! C ABI over the gcsg solvers.
//!
//! Graphs are opaque handles created by [`gcsg_graph_new`] and released by
//! [`gcsg_graph_free`]. Every other call returns a [`GcsgStatus`]; on failure
//! [`gcsg_last_error`] describes the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gcsg_core::dispatch::{solve, Algorithm, SolveOptions};
use gcsg_core::enumeration::count_connected_structures;
use gcsg_core::{classify_graph, BoundaryConstraint, CoalitionStructure, EdgeSumValuation, GcsgError, Graph, GraphClass};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    ClassMismatch = 4,
    BudgetExceeded = 5,
    CapExceeded = 6,
    Infeasible = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcsgAlgorithm {
    Auto = 0,
    Bruteforce = 1,
    Tree = 2,
    MinorFree = 3,
    Separator = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcsgClass {
    Acyclic = 0,
    K4MinorFree = 1,
    K23MinorFree = 2,
    General = 3,
}

/// Edge-weighted graph.
pub struct GcsgGraph {
    graph: Graph,
    weights: EdgeSumValuation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &GcsgError) -> GcsgStatus {
    match err {
        GcsgError::InvalidGraph(_) | GcsgError::Disconnected => GcsgStatus::InvalidGraph,
        GcsgError::ClassMismatch(_) => GcsgStatus::ClassMismatch,
        GcsgError::BudgetExceeded(_) => GcsgStatus::BudgetExceeded,
        GcsgError::CapExceeded { .. } => GcsgStatus::CapExceeded,
        _ => GcsgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (GcsgStatus, String)>) -> GcsgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GcsgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GcsgStatus::Panic
        }
    }
}

fn core_err(e: GcsgError) -> (GcsgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GcsgStatus, String) {
    (GcsgStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// Non-null slices must point to `len` readable elements.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (GcsgStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gcsg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph on nodes `0..n` with edges `(us[k], vs[k])` of weight
/// `weights[k]`.
///
/// # Safety
/// `us`, `vs` and `weights` must hold `edge_count` elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn gcsg_graph_new(
    n: usize,
    us: *const usize,
    vs: *const usize,
    weights: *const i64,
    edge_count: usize,
    out: *mut *mut GcsgGraph,
) -> GcsgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let us = slice(us, edge_count, "us")?;
        let vs = slice(vs, edge_count, "vs")?;
        let ws = slice(weights, edge_count, "weights")?;
        let graph = Graph::new(n, us.iter().copied().zip(vs.iter().copied())).map_err(core_err)?;
        // edges are stored as given, so weights line up
        let weights = EdgeSumValuation::new(&graph, ws).map_err(core_err)?;
        *out = Box::into_raw(Box::new(GcsgGraph { graph, weights }));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from [`gcsg_graph_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gcsg_graph_free(graph: *mut GcsgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gcsg_graph_node_count(graph: *const GcsgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.node_count())
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gcsg_graph_edge_count(graph: *const GcsgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcsg_classify(graph: *const GcsgGraph, out: *mut GcsgClass) -> GcsgStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match classify_graph(&g.graph).map_err(core_err)? {
            GraphClass::Acyclic => GcsgClass::Acyclic,
            GraphClass::K4MinorFree => GcsgClass::K4MinorFree,
            GraphClass::K23MinorFree => GcsgClass::K23MinorFree,
            GraphClass::General => GcsgClass::General,
        };
        Ok(())
    })
}

/// Number of connected structures, for graphs of at most `cap` nodes.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcsg_count_structures(graph: *const GcsgGraph, cap: usize, out: *mut u64) -> GcsgStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let count = count_connected_structures(&g.graph, cap).map_err(core_err)?;
        *out = u64::try_from(count).map_err(|_| (GcsgStatus::CapExceeded, "count exceeds 64 bits".into()))?;
        Ok(())
    })
}

/// Optimal connected structure. Writes the block index of every node to
/// `labels` (length `n`, blocks numbered by smallest member) and the total
/// value to `value`.
///
/// `constraint` is null or holds `n` entries: `-1` for a free node,
/// otherwise a group id; nodes with equal ids must share a block and
/// nodes with different ids must not. Returns `Infeasible` when no
/// connected structure meets it.
///
/// # Safety
/// `graph` must be a live handle; `labels` must hold `n` writable entries;
/// `constraint`, when non-null, must hold `n` entries; `value` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn gcsg_solve(
    graph: *const GcsgGraph,
    algorithm: GcsgAlgorithm,
    constraint: *const i64,
    labels: *mut usize,
    value: *mut i64,
) -> GcsgStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let n = g.graph.node_count();
        let value = value.as_mut().ok_or_else(|| null("value"))?;
        if labels.is_null() && n > 0 {
            return Err(null("labels"));
        }
        let constraint = if constraint.is_null() {
            BoundaryConstraint::none()
        } else {
            constraint_from(slice(constraint, n, "constraint")?)?
        };
        let algorithm = match algorithm {
            GcsgAlgorithm::Auto => Algorithm::Auto,
            GcsgAlgorithm::Bruteforce => Algorithm::Bruteforce,
            GcsgAlgorithm::Tree => Algorithm::Tree,
            GcsgAlgorithm::MinorFree => Algorithm::MinorFree,
            GcsgAlgorithm::Separator => Algorithm::Separator,
        };
        let options = SolveOptions { algorithm, ..Default::default() };
        let report = solve(&g.graph, &g.weights, &constraint, &options).map_err(core_err)?;
        let sol = report
            .solution
            .ok_or((GcsgStatus::Infeasible, "constraint admits no connected structure".to_string()))?;
        if n > 0 {
            let out = std::slice::from_raw_parts_mut(labels, n);
            out.copy_from_slice(&sol.structure.labels(n));
        }
        *value = sol.value;
        Ok(())
    })
}

fn constraint_from(groups: &[i64]) -> Result<BoundaryConstraint, (GcsgStatus, String)> {
    let nodes: Vec<usize> = (0..groups.len()).filter(|&v| groups[v] >= 0).collect();
    if groups.iter().any(|&x| x < -1) {
        return Err((GcsgStatus::InvalidArgument, "constraint entries must be -1 or a group id".into()));
    }
    let labels: Vec<usize> = groups.iter().map(|&x| x.max(0) as usize).collect();
    let cs = CoalitionStructure::from_labels(nodes, &labels);
    Ok(BoundaryConstraint::new(cs))
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gcsg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
