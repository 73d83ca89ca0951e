//! C ABI for the netexp library.
//!
//! Handles (`NxGraph`, `NxClustering`, `NxAssignment`) are opaque pointers
//! created and destroyed by this library; every fallible call returns an
//! [`NxStatus`] and leaves a human-readable message retrievable through
//! [`nx_last_error_message`] on failure. Buffers are always allocated by
//! the caller, sized to the graph's vertex count.
//!
//! The header `include/netexp.h` is regenerated by the build script.
//!
//! Pointer contracts (which arguments may be null, required buffer
//! lengths) are stated on each function; all remaining safety obligations
//! are the usual C ones: pass only handles created by this library and
//! free them exactly once.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use netexp::clustering::{epsilon_net_clustering, Clustering};
use netexp::design::{draw_assignment, Assignment, Design};
use netexp::error::Error;
use netexp::estimators;
use netexp::exposure::{
    effective_indicator, exposure_prob_cluster, exposure_prob_independent, ExposureProbabilities,
    ExposureSpec, Side,
};
use netexp::graph::{
    clustering_coefficient, generate_dcbm, generate_small_world, DcbmSpec, Graph, SmallWorldSpec,
};
use netexp::outcomes::{simulate, true_ate_monte_carlo, LinkFunction, ResponseModel};
use netexp::rng::{stream, StreamRole};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    ParseError = 4,
    IoError = 5,
    EnumerationTooLarge = 6,
    ZeroExposureProbability = 7,
    Internal = 8,
}

/// Link function selector for the outcome process.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NxLink {
    Probit = 0,
    Identity = 1,
    IdentityNoiseless = 2,
}

impl NxLink {
    fn to_link(self) -> LinkFunction {
        match self {
            NxLink::Probit => LinkFunction::ProbitThreshold,
            NxLink::Identity => LinkFunction::Identity { noise: true },
            NxLink::IdentityNoiseless => LinkFunction::Identity { noise: false },
        }
    }
}

/// Effective-treatment condition selector; `lambda` is read only for the
/// fractional kinds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NxExposure {
    Itr = 0,
    Fntr = 1,
    Ntr = 2,
    ClusterFntr = 3,
}

impl NxExposure {
    fn to_spec(self, lambda: f64) -> ExposureSpec {
        match self {
            NxExposure::Itr => ExposureSpec::Itr,
            NxExposure::Fntr => ExposureSpec::Fntr { lambda },
            NxExposure::Ntr => ExposureSpec::Ntr,
            NxExposure::ClusterFntr => ExposureSpec::ClusterFntr { lambda },
        }
    }
}

/// Opaque undirected simple graph.
pub struct NxGraph {
    inner: Graph,
}

/// Opaque vertex partition.
pub struct NxClustering {
    inner: Clustering,
}

/// Opaque drawn treatment assignment.
pub struct NxAssignment {
    inner: Assignment,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> NxStatus {
    match err {
        Error::InvalidSpec(_) | Error::Config(_) => NxStatus::InvalidSpec,
        Error::Parse { .. } => NxStatus::ParseError,
        Error::Io(_) | Error::Csv(_) => NxStatus::IoError,
        Error::EnumerationTooLarge { .. } => NxStatus::EnumerationTooLarge,
        Error::ZeroExposureProbability { .. } => NxStatus::ZeroExposureProbability,
        Error::InvalidClustering(_)
        | Error::InconsistentAssignment(_)
        | Error::EstimandScope(_) => NxStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> NxStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn guarded(body: impl FnOnce() -> NxStatus) -> NxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in netexp".into());
            set_error(&message);
            NxStatus::Internal
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nx_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

macro_rules! nonnull {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!("null pointer: ", stringify!($ptr)));
                return NxStatus::NullPointer;
            }
        }
    };
}

fn emit<T>(out: *mut *mut T, value: T) -> NxStatus {
    if out.is_null() {
        set_error("null output pointer");
        return NxStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    NxStatus::Ok
}

// --------------------------------------------------------------------
// Graphs
// --------------------------------------------------------------------

/// Generates a small-world graph (ring lattice of degree `k`, each lattice
/// edge rewired with probability `p_rewire`) from a deterministic seed.
#[no_mangle]
pub unsafe extern "C" fn nx_graph_small_world(
    n: usize,
    k: usize,
    p_rewire: f64,
    seed: u64,
    out: *mut *mut NxGraph,
) -> NxStatus {
    guarded(|| {
        let mut rng = stream(seed, "ffi-graph", 0, StreamRole::Graph);
        match generate_small_world(&SmallWorldSpec { n, k, p_rewire }, &mut rng) {
            Ok(g) => emit(out, NxGraph { inner: g }),
            Err(e) => fail(e),
        }
    })
}

/// Generates a degree-corrected blockmodel graph from a deterministic seed.
#[no_mangle]
pub unsafe extern "C" fn nx_graph_dcbm(
    n: usize,
    communities: usize,
    p_within: f64,
    degree_mean: f64,
    degree_variance: f64,
    seed: u64,
    out: *mut *mut NxGraph,
) -> NxStatus {
    guarded(|| {
        let spec = DcbmSpec {
            n,
            communities,
            p_within,
            degree_mean,
            degree_variance,
        };
        let mut rng = stream(seed, "ffi-graph", 0, StreamRole::Graph);
        match generate_dcbm(&spec, &mut rng) {
            Ok(g) => emit(out, NxGraph { inner: g }),
            Err(e) => fail(e),
        }
    })
}

/// Reads an edge-list file (`u v` per line, 0-based ids).
#[no_mangle]
pub unsafe extern "C" fn nx_graph_read_edge_list(
    path: *const c_char,
    out: *mut *mut NxGraph,
) -> NxStatus {
    guarded(|| {
        if path.is_null() {
            set_error("null path");
            return NxStatus::NullPointer;
        }
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(p) => p,
            Err(_) => {
                set_error("path is not valid UTF-8");
                return NxStatus::InvalidArgument;
            }
        };
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) => return fail(Error::Io(e)),
        };
        match Graph::read_edge_list(std::io::BufReader::new(file)) {
            Ok(g) => emit(out, NxGraph { inner: g }),
            Err(e) => fail(e),
        }
    })
}

/// Frees a graph handle; a null pointer is ignored.
#[no_mangle]
pub unsafe extern "C" fn nx_graph_free(graph: *mut NxGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn nx_graph_vertex_count(graph: *const NxGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.vertex_count())
}

#[no_mangle]
pub unsafe extern "C" fn nx_graph_edge_count(graph: *const NxGraph) -> usize {
    unsafe { graph.as_ref() }.map_or(0, |g| g.inner.edge_count())
}

/// Average local clustering coefficient; NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nx_graph_clustering_coefficient(graph: *const NxGraph) -> f64 {
    unsafe { graph.as_ref() }.map_or(f64::NAN, |g| clustering_coefficient(&g.inner))
}

// --------------------------------------------------------------------
// Clusterings
// --------------------------------------------------------------------

/// Builds an epsilon-net clustering with randomized center selection.
#[no_mangle]
pub unsafe extern "C" fn nx_clustering_epsilon_net(
    graph: *const NxGraph,
    epsilon: usize,
    seed: u64,
    out: *mut *mut NxClustering,
) -> NxStatus {
    guarded(|| {
        let graph = nonnull!(graph);
        if epsilon < 1 {
            set_error("epsilon must be at least 1");
            return NxStatus::InvalidArgument;
        }
        let mut rng = stream(seed, "ffi-net", 0, StreamRole::Assignment);
        let clustering = epsilon_net_clustering(&graph.inner, epsilon, &mut rng);
        emit(out, NxClustering { inner: clustering })
    })
}

/// Builds the clustering with every vertex in its own cluster.
#[no_mangle]
pub unsafe extern "C" fn nx_clustering_singleton(
    n: usize,
    out: *mut *mut NxClustering,
) -> NxStatus {
    guarded(|| {
        if n == 0 {
            set_error("singleton clustering needs at least one vertex");
            return NxStatus::InvalidArgument;
        }
        emit(
            out,
            NxClustering {
                inner: Clustering::singleton(n),
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn nx_clustering_free(clustering: *mut NxClustering) {
    if !clustering.is_null() {
        drop(unsafe { Box::from_raw(clustering) });
    }
}

/// Number of clusters in the partition.
#[no_mangle]
pub unsafe extern "C" fn nx_clustering_count(clustering: *const NxClustering) -> usize {
    unsafe { clustering.as_ref() }.map_or(0, |c| c.inner.n_clusters())
}

/// Cluster id of a vertex, or `SIZE_MAX` when out of range.
#[no_mangle]
pub unsafe extern "C" fn nx_clustering_of(clustering: *const NxClustering, vertex: usize) -> usize {
    match unsafe { clustering.as_ref() } {
        Some(c) if vertex < c.inner.len() => c.inner.cluster_of(vertex),
        _ => usize::MAX,
    }
}

// --------------------------------------------------------------------
// Treatment assignment
// --------------------------------------------------------------------

fn draw(design: Result<Design, Error>, seed: u64, out: *mut *mut NxAssignment) -> NxStatus {
    match design {
        Ok(design) => {
            let mut rng = stream(seed, "ffi-assign", 0, StreamRole::Assignment);
            emit(
                out,
                NxAssignment {
                    inner: draw_assignment(&design, &mut rng),
                },
            )
        }
        Err(e) => fail(e),
    }
}

/// Draws iid Bernoulli(q) assignments for `n` vertices.
#[no_mangle]
pub unsafe extern "C" fn nx_assignment_independent(
    n: usize,
    q: f64,
    seed: u64,
    out: *mut *mut NxAssignment,
) -> NxStatus {
    guarded(|| draw(Design::independent(n, q), seed, out))
}

/// Draws cluster-level Bernoulli(q) assignments over a clustering.
#[no_mangle]
pub unsafe extern "C" fn nx_assignment_graph_cluster(
    clustering: *const NxClustering,
    q: f64,
    seed: u64,
    out: *mut *mut NxAssignment,
) -> NxStatus {
    guarded(|| {
        let clustering = nonnull!(clustering);
        draw(
            Design::graph_cluster(clustering.inner.clone(), q),
            seed,
            out,
        )
    })
}

/// Treats exactly half of the clusters, chosen uniformly at random.
#[no_mangle]
pub unsafe extern "C" fn nx_assignment_balanced_graph_cluster(
    clustering: *const NxClustering,
    seed: u64,
    out: *mut *mut NxAssignment,
) -> NxStatus {
    guarded(|| {
        let clustering = nonnull!(clustering);
        draw(
            Design::balanced_graph_cluster(clustering.inner.clone()),
            seed,
            out,
        )
    })
}

/// Cluster assignment with per-vertex hole punching: each vertex keeps its
/// cluster's draw with probability `eta` and flips it otherwise.
#[no_mangle]
pub unsafe extern "C" fn nx_assignment_hole_punched(
    clustering: *const NxClustering,
    q: f64,
    eta: f64,
    seed: u64,
    out: *mut *mut NxAssignment,
) -> NxStatus {
    guarded(|| {
        let clustering = nonnull!(clustering);
        draw(
            Design::hole_punched(clustering.inner.clone(), q, None, eta),
            seed,
            out,
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn nx_assignment_free(assignment: *mut NxAssignment) {
    if !assignment.is_null() {
        drop(unsafe { Box::from_raw(assignment) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn nx_assignment_len(assignment: *const NxAssignment) -> usize {
    unsafe { assignment.as_ref() }.map_or(0, |a| a.inner.z.len())
}

/// Copies the binary treatment vector into a caller buffer of length `len`
/// (which must equal the assignment length).
#[no_mangle]
pub unsafe extern "C" fn nx_assignment_copy_z(
    assignment: *const NxAssignment,
    buffer: *mut u8,
    len: usize,
) -> NxStatus {
    guarded(|| {
        let assignment = nonnull!(assignment);
        if buffer.is_null() {
            set_error("null buffer");
            return NxStatus::NullPointer;
        }
        if len != assignment.inner.z.len() {
            set_error("buffer length does not match assignment length");
            return NxStatus::InvalidArgument;
        }
        unsafe { std::ptr::copy_nonoverlapping(assignment.inner.z.as_ptr(), buffer, len) };
        NxStatus::Ok
    })
}

// --------------------------------------------------------------------
// Outcome process
// --------------------------------------------------------------------

/// Runs the peer-effect outcome process and writes the final behaviors
/// into `y_out` (length = vertex count).
#[no_mangle]
pub unsafe extern "C" fn nx_simulate_final(
    graph: *const NxGraph,
    assignment: *const NxAssignment,
    alpha: f64,
    beta: f64,
    gamma: f64,
    steps: usize,
    link: NxLink,
    noise_seed: u64,
    y_out: *mut f64,
) -> NxStatus {
    guarded(|| {
        let graph = nonnull!(graph);
        let assignment = nonnull!(assignment);
        if y_out.is_null() {
            set_error("null output buffer");
            return NxStatus::NullPointer;
        }
        let n = graph.inner.vertex_count();
        if assignment.inner.z.len() != n {
            set_error("assignment length does not match the graph");
            return NxStatus::InvalidArgument;
        }
        if steps == 0 {
            set_error("the outcome process needs at least one step");
            return NxStatus::InvalidArgument;
        }
        let model = ResponseModel {
            alpha,
            beta,
            gamma,
            steps,
            link: link.to_link(),
        };
        let mut rng = stream(noise_seed, "ffi-noise", 0, StreamRole::OutcomeNoise);
        let trajectory = simulate(&graph.inner, &assignment.inner.z, &model, &mut rng);
        let last = trajectory.final_outcomes();
        unsafe { std::ptr::copy_nonoverlapping(last.as_ptr(), y_out, n) };
        NxStatus::Ok
    })
}

/// Monte Carlo ground-truth average treatment effect: paired global
/// treatment / global control runs on common noise.
#[no_mangle]
pub unsafe extern "C" fn nx_true_ate(
    graph: *const NxGraph,
    alpha: f64,
    beta: f64,
    gamma: f64,
    steps: usize,
    link: NxLink,
    replications: usize,
    seed: u64,
    ate_out: *mut f64,
    se_out: *mut f64,
) -> NxStatus {
    guarded(|| {
        let graph = nonnull!(graph);
        if ate_out.is_null() || se_out.is_null() {
            set_error("null output pointer");
            return NxStatus::NullPointer;
        }
        if steps == 0 || replications == 0 {
            set_error("steps and replications must be positive");
            return NxStatus::InvalidArgument;
        }
        let model = ResponseModel {
            alpha,
            beta,
            gamma,
            steps,
            link: link.to_link(),
        };
        let (ate, se) = true_ate_monte_carlo(&graph.inner, &model, replications, seed);
        unsafe {
            *ate_out = ate;
            *se_out = se;
        }
        NxStatus::Ok
    })
}

// --------------------------------------------------------------------
// Exposure probabilities and estimators
// --------------------------------------------------------------------

fn write_pi(pi: ExposureProbabilities, n: usize, pi1_out: *mut f64, pi0_out: *mut f64) -> NxStatus {
    if pi1_out.is_null() || pi0_out.is_null() {
        set_error("null output buffer");
        return NxStatus::NullPointer;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(pi.pi1.as_ptr(), pi1_out, n);
        std::ptr::copy_nonoverlapping(pi.pi0.as_ptr(), pi0_out, n);
    }
    NxStatus::Ok
}

/// Exposure probabilities under iid Bernoulli(q) vertex assignment, for
/// vertex-level conditions. Buffers must hold one value per vertex.
#[no_mangle]
pub unsafe extern "C" fn nx_exposure_prob_independent(
    graph: *const NxGraph,
    exposure: NxExposure,
    lambda: f64,
    q: f64,
    pi1_out: *mut f64,
    pi0_out: *mut f64,
) -> NxStatus {
    guarded(|| {
        let graph = nonnull!(graph);
        match exposure_prob_independent(&graph.inner, &exposure.to_spec(lambda), q) {
            Ok(pi) => write_pi(pi, graph.inner.vertex_count(), pi1_out, pi0_out),
            Err(e) => fail(e),
        }
    })
}

/// Exact exposure probabilities under graph cluster randomization with iid
/// Bernoulli(q) cluster assignment (convolution dynamic program).
#[no_mangle]
pub unsafe extern "C" fn nx_exposure_prob_cluster(
    graph: *const NxGraph,
    clustering: *const NxClustering,
    exposure: NxExposure,
    lambda: f64,
    q: f64,
    pi1_out: *mut f64,
    pi0_out: *mut f64,
) -> NxStatus {
    guarded(|| {
        let graph = nonnull!(graph);
        let clustering = nonnull!(clustering);
        if clustering.inner.len() != graph.inner.vertex_count() {
            set_error("clustering does not cover the graph");
            return NxStatus::InvalidArgument;
        }
        match exposure_prob_cluster(
            &graph.inner,
            &clustering.inner,
            &exposure.to_spec(lambda),
            q,
        ) {
            Ok(pi) => write_pi(pi, graph.inner.vertex_count(), pi1_out, pi0_out),
            Err(e) => fail(e),
        }
    })
}

fn write_estimate(
    result: estimators::EstimatorResult,
    estimate_out: *mut f64,
    defined_out: *mut c_int,
) -> NxStatus {
    if estimate_out.is_null() || defined_out.is_null() {
        set_error("null output pointer");
        return NxStatus::NullPointer;
    }
    unsafe {
        match result.estimate {
            Some(v) => {
                *estimate_out = v;
                *defined_out = 1;
            }
            None => {
                *estimate_out = f64::NAN;
                *defined_out = 0;
            }
        }
    }
    NxStatus::Ok
}

/// Difference in sample means between treated and control vertices.
/// `defined_out` is 0 (and the estimate NaN) when a group is empty.
#[no_mangle]
pub unsafe extern "C" fn nx_diff_in_means(
    y: *const f64,
    z: *const u8,
    n: usize,
    estimate_out: *mut f64,
    defined_out: *mut c_int,
) -> NxStatus {
    guarded(|| {
        if y.is_null() || z.is_null() {
            set_error("null input buffer");
            return NxStatus::NullPointer;
        }
        let y = unsafe { std::slice::from_raw_parts(y, n) };
        let z = unsafe { std::slice::from_raw_parts(z, n) };
        if z.iter().any(|&b| b > 1) {
            set_error("assignment entries must be 0 or 1");
            return NxStatus::InvalidArgument;
        }
        write_estimate(estimators::diff_in_means(y, z), estimate_out, defined_out)
    })
}

enum Weighted {
    Hajek,
    HorvitzThompson,
}

#[allow(clippy::too_many_arguments)]
fn weighted_estimator(
    which: Weighted,
    graph: *const NxGraph,
    clustering: *const NxClustering,
    exposure: NxExposure,
    lambda: f64,
    q: f64,
    y: *const f64,
    assignment: *const NxAssignment,
    estimate_out: *mut f64,
    defined_out: *mut c_int,
) -> NxStatus {
    let graph = nonnull!(graph);
    let assignment = nonnull!(assignment);
    if y.is_null() {
        set_error("null outcome buffer");
        return NxStatus::NullPointer;
    }
    let n = graph.inner.vertex_count();
    if assignment.inner.z.len() != n {
        set_error("assignment length does not match the graph");
        return NxStatus::InvalidArgument;
    }
    let y = unsafe { std::slice::from_raw_parts(y, n) };
    let spec = exposure.to_spec(lambda);
    let clustering = unsafe { clustering.as_ref() }.map(|c| &c.inner);
    if let Some(c) = clustering {
        if c.len() != n {
            set_error("clustering does not cover the graph");
            return NxStatus::InvalidArgument;
        }
    }
    if clustering.is_none() && !spec.is_vertex_level() {
        set_error("cluster-level exposure conditions require a clustering");
        return NxStatus::InvalidArgument;
    }
    let pi = match clustering {
        Some(c) => exposure_prob_cluster(&graph.inner, c, &spec, q),
        None => exposure_prob_independent(&graph.inner, &spec, q),
    };
    let pi = match pi {
        Ok(pi) => pi,
        Err(e) => return fail(e),
    };
    let flags = |side: Side| -> Vec<bool> {
        (0..n)
            .map(|i| {
                effective_indicator(
                    &spec,
                    &graph.inner,
                    clustering,
                    &assignment.inner.z,
                    side,
                    i,
                )
            })
            .collect()
    };
    let ind1 = flags(Side::Treatment);
    let ind0 = flags(Side::Control);
    let result = match which {
        Weighted::Hajek => estimators::hajek(y, &ind1, &ind0, &pi),
        Weighted::HorvitzThompson => estimators::horvitz_thompson(y, &ind1, &ind0, &pi, n),
    };
    match result {
        Ok(r) => write_estimate(r, estimate_out, defined_out),
        Err(e) => fail(e),
    }
}

/// Hajek (ratio-normalized inverse-probability-weighted) estimator under
/// the exposure condition. Pass a null clustering for independent
/// assignment; otherwise exposure probabilities are computed under graph
/// cluster randomization on the given clustering with probability `q`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nx_hajek(
    graph: *const NxGraph,
    clustering: *const NxClustering,
    exposure: NxExposure,
    lambda: f64,
    q: f64,
    y: *const f64,
    assignment: *const NxAssignment,
    estimate_out: *mut f64,
    defined_out: *mut c_int,
) -> NxStatus {
    guarded(|| {
        weighted_estimator(
            Weighted::Hajek,
            graph,
            clustering,
            exposure,
            lambda,
            q,
            y,
            assignment,
            estimate_out,
            defined_out,
        )
    })
}

/// Horvitz--Thompson estimator under the exposure condition; see
/// [`nx_hajek`] for the clustering convention.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nx_horvitz_thompson(
    graph: *const NxGraph,
    clustering: *const NxClustering,
    exposure: NxExposure,
    lambda: f64,
    q: f64,
    y: *const f64,
    assignment: *const NxAssignment,
    estimate_out: *mut f64,
    defined_out: *mut c_int,
) -> NxStatus {
    guarded(|| {
        weighted_estimator(
            Weighted::HorvitzThompson,
            graph,
            clustering,
            exposure,
            lambda,
            q,
            y,
            assignment,
            estimate_out,
            defined_out,
        )
    })
}
