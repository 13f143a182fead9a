//! C ABI over the core inference library.
//!
//! Conventions: fallible functions return a status code (`CPSBM_OK` is 0)
//! and write results through out-pointers. On failure, a thread-local
//! message retrievable via [`cpsbm_last_error`] describes what went wrong.
//! Handles are opaque; free each exactly once with its `_free` function.
//! Panics cannot cross the boundary: they are caught and reported as
//! `CPSBM_ERR_PANIC`.
//!
//! Output buffers for per-node vectors must hold at least
//! `cpsbm_graph_node_count` elements. Block labels are 0-based on this
//! interface, with block 0 the innermost (densest) one.

use cpsbm::error::Error;
use cpsbm::graph::{load_edge_list_path, preprocess, EdgeListFormat};
use cpsbm::mdl::{default_estimator, estimate_dl, Estimator};
use cpsbm::model::ModelKind;
use cpsbm::partition::Partition;
use cpsbm::synth::{fit_best, scoring_partition, FitParams};
use cpsbm::{classic, metrics, Graph};
use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

pub const CPSBM_OK: c_int = 0;
/// A required pointer argument was null.
pub const CPSBM_ERR_NULL: c_int = 1;
/// A string argument was not valid UTF-8.
pub const CPSBM_ERR_UTF8: c_int = 2;
pub const CPSBM_ERR_IO: c_int = 3;
pub const CPSBM_ERR_PARSE: c_int = 4;
pub const CPSBM_ERR_INVALID: c_int = 5;
pub const CPSBM_ERR_NUMERICAL: c_int = 6;
/// An internal panic was caught at the boundary.
pub const CPSBM_ERR_PANIC: c_int = 7;

/// Opaque preprocessed graph handle.
pub struct CpsbmGraph(Graph);

/// Opaque fitted-model handle: best-of-restarts partition, coreness, and
/// description length.
pub struct CpsbmFit {
    nodes: usize,
    block_count: u32,
    bits: f64,
    bits_per_edge: f64,
    ess: f64,
    acceptance_rate: f64,
    blocks: Vec<u32>,
    coreness: Vec<f64>,
    mean_densities: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(code: c_int, msg: &str) -> c_int {
    let sanitized = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
    code
}

fn fail_err(e: &Error) -> c_int {
    let code = match e {
        Error::Io(_) => CPSBM_ERR_IO,
        Error::Parse { .. } => CPSBM_ERR_PARSE,
        Error::Invalid(_) => CPSBM_ERR_INVALID,
        Error::Numerical(_) => CPSBM_ERR_NUMERICAL,
    };
    fail(code, &e.to_string())
}

fn null_arg() -> c_int {
    fail(CPSBM_ERR_NULL, "null pointer argument")
}

fn guard<F: FnOnce() -> c_int>(f: F) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(CPSBM_ERR_PANIC, "internal panic caught at the C boundary"),
    }
}

/// Message for the most recent failure on the calling thread. The pointer
/// stays valid until the next failing call on the same thread. Never null;
/// empty string when nothing has failed yet.
#[no_mangle]
pub extern "C" fn cpsbm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cpsbm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads and canonicalizes an edge-list file (drops self-loops and
/// duplicates, keeps the largest connected component).
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` must be valid for
/// a pointer write. On success `*out` owns the graph; release it with
/// [`cpsbm_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn cpsbm_graph_load(
    path: *const c_char,
    out: *mut *mut CpsbmGraph,
) -> c_int {
    guard(|| {
        if path.is_null() || out.is_null() {
            return null_arg();
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(_) => return fail(CPSBM_ERR_UTF8, "path is not valid UTF-8"),
        };
        let raw = match load_edge_list_path(Path::new(path), EdgeListFormat::Plain) {
            Ok(r) => r,
            Err(e) => return fail_err(&e),
        };
        match preprocess(&raw) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(CpsbmGraph(g)));
                CPSBM_OK
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Builds a graph from parallel arrays of edge endpoints with node ids in
/// `0..n`. Self-loops and duplicate edges are dropped.
///
/// # Safety
/// `src` and `dst` must be valid for `m` reads each (or null when `m` is 0)
/// and `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_graph_from_edges(
    n: u32,
    src: *const u32,
    dst: *const u32,
    m: usize,
    out: *mut *mut CpsbmGraph,
) -> c_int {
    guard(|| {
        if out.is_null() || (m > 0 && (src.is_null() || dst.is_null())) {
            return null_arg();
        }
        let edges: Vec<(u32, u32)> = if m == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(src, m)
                .iter()
                .copied()
                .zip(std::slice::from_raw_parts(dst, m).iter().copied())
                .collect()
        };
        match Graph::from_edges(n as usize, &edges) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(CpsbmGraph(g)));
                CPSBM_OK
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Releases a graph handle. Null is a no-op.
///
/// # Safety
/// `g` must be null or a pointer previously returned by a `cpsbm_graph_*`
/// constructor and not freed since.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_graph_free(g: *mut CpsbmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_graph_node_count(
    g: *const CpsbmGraph,
    out: *mut usize,
) -> c_int {
    guard(|| match (g.as_ref(), out.is_null()) {
        (Some(g), false) => {
            *out = g.0.node_count();
            CPSBM_OK
        }
        _ => null_arg(),
    })
}

/// # Safety
/// `g` must be a live graph handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_graph_edge_count(
    g: *const CpsbmGraph,
    out: *mut usize,
) -> c_int {
    guard(|| match (g.as_ref(), out.is_null()) {
        (Some(g), false) => {
            *out = g.0.edge_count();
            CPSBM_OK
        }
        _ => null_arg(),
    })
}

/// Exact k-core decomposition; writes one core number per node.
///
/// # Safety
/// `g` must be a live graph handle; `out_cores` must be valid for
/// `cpsbm_graph_node_count` writes.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_kcores(g: *const CpsbmGraph, out_cores: *mut u32) -> c_int {
    guard(|| {
        let Some(g) = g.as_ref() else {
            return null_arg();
        };
        if out_cores.is_null() {
            return null_arg();
        }
        let cores = classic::k_core_decomposition(&g.0);
        let out = std::slice::from_raw_parts_mut(out_cores, cores.len());
        for (dst, &c) in out.iter_mut().zip(&cores) {
            *dst = c as u32;
        }
        CPSBM_OK
    })
}

/// Combinatorial two-block baseline. Writes 0 (core) or 1 (periphery) per
/// node plus the core size and the objective value.
///
/// # Safety
/// `g` must be a live graph handle; `out_blocks` must be valid for
/// `cpsbm_graph_node_count` writes; `out_core_size` and `out_z` for one
/// write each.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_two_block(
    g: *const CpsbmGraph,
    out_blocks: *mut u32,
    out_core_size: *mut usize,
    out_z: *mut u64,
) -> c_int {
    guard(|| {
        let Some(g) = g.as_ref() else {
            return null_arg();
        };
        if out_blocks.is_null() || out_core_size.is_null() || out_z.is_null() {
            return null_arg();
        }
        match classic::two_block_partition(&g.0) {
            Ok(fit) => {
                let out = std::slice::from_raw_parts_mut(out_blocks, fit.partition.len());
                for (dst, &b) in out.iter_mut().zip(&fit.partition.blocks) {
                    *dst = b as u32;
                }
                *out_core_size = fit.core_size;
                *out_z = fit.z;
                CPSBM_OK
            }
            Err(e) => fail_err(&e),
        }
    })
}

fn kind_from_layers(layers: u32) -> Result<ModelKind, c_int> {
    match layers {
        0 => Ok(ModelKind::HubSpoke),
        1 => Err(fail(CPSBM_ERR_INVALID, "layers must be 0 (hub) or ≥ 2")),
        l => Ok(ModelKind::Layered(l as usize)),
    }
}

fn estimator_from(code: c_int, kind: ModelKind) -> Result<Estimator, c_int> {
    match code {
        0 => Ok(default_estimator(kind)),
        1 => Ok(Estimator::Naive),
        2 => Ok(Estimator::Importance),
        _ => Err(fail(
            CPSBM_ERR_INVALID,
            "estimator must be 0 (auto), 1 (naive), or 2 (importance)",
        )),
    }
}

/// Fits one model family by Gibbs sampling with restarts and returns the
/// fewest-bits fit. `layers` selects the family: 0 for hub-and-spoke, ≥ 2
/// for that many layers.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for a pointer write. On
/// success `*out` owns the fit; release it with [`cpsbm_fit_free`].
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit(
    g: *const CpsbmGraph,
    layers: u32,
    sweeps: u32,
    mcmc_per_node: u32,
    restarts: u32,
    dl_samples: u64,
    seed: u64,
    out: *mut *mut CpsbmFit,
) -> c_int {
    guard(|| {
        let Some(g) = g.as_ref() else {
            return null_arg();
        };
        if out.is_null() {
            return null_arg();
        }
        let kind = match kind_from_layers(layers) {
            Ok(k) => k,
            Err(code) => return code,
        };
        let fp = FitParams {
            restarts: restarts as usize,
            sweeps: sweeps as usize,
            mcmc_per_node: mcmc_per_node as usize,
            dl_samples,
            estimator: default_estimator(kind),
            ..FitParams::default()
        };
        let (ev, chain) = match fit_best(&g.0, kind, &fp, seed) {
            Ok(r) => r,
            Err(e) => return fail_err(&e),
        };
        let partition = match scoring_partition(&chain) {
            Ok(p) => p,
            Err(e) => return fail_err(&e),
        };
        let fit = CpsbmFit {
            nodes: g.0.node_count(),
            block_count: partition.block_count as u32,
            bits: ev.estimate.bits,
            bits_per_edge: ev.estimate.bits_per_edge,
            ess: ev.estimate.ess,
            acceptance_rate: chain.acceptance_rate,
            blocks: partition.blocks.iter().map(|&b| b as u32).collect(),
            coreness: chain.coreness,
            mean_densities: chain.mean_densities,
        };
        *out = Box::into_raw(Box::new(fit));
        CPSBM_OK
    })
}

/// Releases a fit handle. Null is a no-op.
///
/// # Safety
/// `f` must be null or a pointer returned by [`cpsbm_fit`] and not freed
/// since.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_free(f: *mut CpsbmFit) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

unsafe fn read_fit<T>(
    f: *const CpsbmFit,
    out: *mut T,
    get: impl FnOnce(&CpsbmFit) -> T,
) -> c_int {
    guard(|| match (f.as_ref(), out.is_null()) {
        (Some(f), false) => {
            *out = get(f);
            CPSBM_OK
        }
        _ => null_arg(),
    })
}

/// Description length of the graph under this fit, in bits.
///
/// # Safety
/// `f` must be a live fit handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_bits(f: *const CpsbmFit, out: *mut c_double) -> c_int {
    read_fit(f, out, |f| f.bits)
}

/// Description length per edge, in bits.
///
/// # Safety
/// `f` must be a live fit handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_bits_per_edge(
    f: *const CpsbmFit,
    out: *mut c_double,
) -> c_int {
    read_fit(f, out, |f| f.bits_per_edge)
}

/// Effective sample size of the evidence estimate.
///
/// # Safety
/// `f` must be a live fit handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_ess(f: *const CpsbmFit, out: *mut c_double) -> c_int {
    read_fit(f, out, |f| f.ess)
}

/// Accepted fraction of label moves over the winning chain.
///
/// # Safety
/// `f` must be a live fit handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_acceptance_rate(
    f: *const CpsbmFit,
    out: *mut c_double,
) -> c_int {
    read_fit(f, out, |f| f.acceptance_rate)
}

/// Number of blocks in the fitted partition.
///
/// # Safety
/// `f` must be a live fit handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_block_count(f: *const CpsbmFit, out: *mut u32) -> c_int {
    read_fit(f, out, |f| f.block_count)
}

/// Writes the fitted block label (0-based, 0 = innermost) of every node.
///
/// # Safety
/// `f` must be a live fit handle; `out_blocks` must be valid for as many
/// writes as the fitted graph has nodes.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_blocks(f: *const CpsbmFit, out_blocks: *mut u32) -> c_int {
    guard(|| {
        let Some(f) = f.as_ref() else {
            return null_arg();
        };
        if out_blocks.is_null() {
            return null_arg();
        }
        std::slice::from_raw_parts_mut(out_blocks, f.nodes).copy_from_slice(&f.blocks);
        CPSBM_OK
    })
}

/// Writes the posterior coreness (0 = peripheral, larger = more core-like)
/// of every node.
///
/// # Safety
/// `f` must be a live fit handle; `out_coreness` must be valid for as many
/// writes as the fitted graph has nodes.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_coreness(
    f: *const CpsbmFit,
    out_coreness: *mut c_double,
) -> c_int {
    guard(|| {
        let Some(f) = f.as_ref() else {
            return null_arg();
        };
        if out_coreness.is_null() {
            return null_arg();
        }
        std::slice::from_raw_parts_mut(out_coreness, f.nodes).copy_from_slice(&f.coreness);
        CPSBM_OK
    })
}

/// Writes the posterior-mean block densities, outermost last. The buffer
/// needs 3 elements for the hub family and `layers` for the layered one.
///
/// # Safety
/// `f` must be a live fit handle; `out_densities` must be valid for
/// `out_len` writes where `out_len` is at least the density count.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_fit_densities(
    f: *const CpsbmFit,
    out_densities: *mut c_double,
    out_len: usize,
) -> c_int {
    guard(|| {
        let Some(f) = f.as_ref() else {
            return null_arg();
        };
        if out_densities.is_null() {
            return null_arg();
        }
        if out_len < f.mean_densities.len() {
            return fail(
                CPSBM_ERR_INVALID,
                "density buffer is smaller than the model's density count",
            );
        }
        std::slice::from_raw_parts_mut(out_densities, f.mean_densities.len())
            .copy_from_slice(&f.mean_densities);
        CPSBM_OK
    })
}

/// Monte Carlo description length of `g` under a fixed partition, in bits.
/// `blocks` holds one 0-based label per node; `layers` selects the family
/// as in [`cpsbm_fit`]; `estimator` is 0 auto, 1 naive, 2 importance.
///
/// # Safety
/// `g` must be a live graph handle; `blocks` must be valid for
/// `cpsbm_graph_node_count` reads; `out_bits` and `out_ess` for one write
/// each.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_estimate_dl(
    g: *const CpsbmGraph,
    blocks: *const u32,
    layers: u32,
    estimator: c_int,
    samples: u64,
    seed: u64,
    out_bits: *mut c_double,
    out_ess: *mut c_double,
) -> c_int {
    guard(|| {
        let Some(g) = g.as_ref() else {
            return null_arg();
        };
        if blocks.is_null() || out_bits.is_null() || out_ess.is_null() {
            return null_arg();
        }
        let kind = match kind_from_layers(layers) {
            Ok(k) => k,
            Err(code) => return code,
        };
        let est = match estimator_from(estimator, kind) {
            Ok(e) => e,
            Err(code) => return code,
        };
        let labels = std::slice::from_raw_parts(blocks, g.0.node_count());
        let partition = match Partition::new(
            labels.iter().map(|&b| b as usize).collect(),
            kind.block_count(),
        ) {
            Ok(p) => p,
            Err(e) => return fail_err(&e),
        };
        match estimate_dl(&g.0, &partition, kind, est, samples, seed) {
            Ok(est) => {
                *out_bits = est.bits;
                *out_ess = est.ess;
                CPSBM_OK
            }
            Err(e) => fail_err(&e),
        }
    })
}

unsafe fn partition_pair(
    a: *const u32,
    b: *const u32,
    n: usize,
) -> Result<(Partition, Partition), c_int> {
    if a.is_null() || b.is_null() {
        return Err(null_arg());
    }
    if n == 0 {
        return Err(fail(CPSBM_ERR_INVALID, "partitions need at least one node"));
    }
    let build = |raw: *const u32| {
        let labels = std::slice::from_raw_parts(raw, n);
        let blocks: Vec<usize> = labels.iter().map(|&v| v as usize).collect();
        let block_count = blocks.iter().max().copied().unwrap_or(0) + 1;
        Partition::new(blocks, block_count)
    };
    match (build(a), build(b)) {
        (Ok(pa), Ok(pb)) => Ok((pa, pb)),
        (Err(e), _) | (_, Err(e)) => Err(fail_err(&e)),
    }
}

unsafe fn metric_call(
    a: *const u32,
    b: *const u32,
    n: usize,
    out: *mut c_double,
    metric: impl FnOnce(&Partition, &Partition) -> cpsbm::Result<f64>,
) -> c_int {
    guard(|| {
        if out.is_null() {
            return null_arg();
        }
        let (pa, pb) = match partition_pair(a, b, n) {
            Ok(p) => p,
            Err(code) => return code,
        };
        match metric(&pa, &pb) {
            Ok(v) => {
                *out = v;
                CPSBM_OK
            }
            Err(e) => fail_err(&e),
        }
    })
}

/// Variation of information between two partitions, in bits. Inputs are two
/// 0-based label arrays of length `n`.
///
/// # Safety
/// `a` and `b` must be valid for `n` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_vi(
    a: *const u32,
    b: *const u32,
    n: usize,
    out: *mut c_double,
) -> c_int {
    metric_call(a, b, n, out, metrics::variation_of_information)
}

/// Variation of information normalized by the joint entropy (0..1). Inputs
/// are two 0-based label arrays of length `n`.
///
/// # Safety
/// `a` and `b` must be valid for `n` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_nvi(
    a: *const u32,
    b: *const u32,
    n: usize,
    out: *mut c_double,
) -> c_int {
    metric_call(a, b, n, out, metrics::normalized_vi)
}

/// Adjusted mutual information (1 = identical up to labels). Inputs are two
/// 0-based label arrays of length `n`.
///
/// # Safety
/// `a` and `b` must be valid for `n` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cpsbm_ami(
    a: *const u32,
    b: *const u32,
    n: usize,
    out: *mut c_double,
) -> c_int {
    metric_call(a, b, n, out, metrics::adjusted_mutual_information)
}
