//! C ABI over the rewiring engine.
//!
//! Handles are opaque pointers owned by the library; every constructor has a
//! matching `_free`. Functions return `RewireStatus`; on failure a
//! thread-local message is readable through `rewire_last_error_message`.

use rewire_core::attack::{self, EntryRule};
use rewire_core::baselines::{self, Strategy};
use rewire_core::env::EnvConfig;
use rewire_core::generate::{self, GeneratorSpec, GraphModel};
use rewire_core::gnn::{self, ModelParams};
use rewire_core::graph::{self, Graph};
use rewire_core::objectives::{self, ObjectiveConfig, ObjectiveKind};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewireStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ComputeError = 4,
    IoError = 5,
    Timeout = 6,
    InternalError = 7,
}

/// Graph families exposed through the C API.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewireGraphModel {
    Ba1 = 0,
    Ba2 = 1,
    Er = 2,
    Ws = 3,
}

/// Objective functions exposed through the C API.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewireObjective {
    Shannon = 0,
    Merw = 1,
}

/// Entry-node sampling rule for attack evaluation.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewireEntryRule {
    /// min(n, 30) entries.
    Synthetic = 0,
    /// every node.
    All = 1,
}

/// Opaque graph handle.
pub struct RewireGraph(Graph);

/// Opaque model-checkpoint handle.
pub struct RewireModel(ModelParams);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstring = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn fail(status: RewireStatus, msg: impl Into<String>) -> RewireStatus {
    set_error(msg.into());
    status
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rewire_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.as_ptr(),
        None => std::ptr::null(),
    })
}

fn objective_kind(objective: RewireObjective) -> ObjectiveKind {
    match objective {
        RewireObjective::Shannon => ObjectiveKind::Shannon,
        RewireObjective::Merw => ObjectiveKind::Merw,
    }
}

fn env_config(objective: RewireObjective, budget_fraction: f64) -> EnvConfig {
    EnvConfig::new(ObjectiveConfig::new(objective_kind(objective)), budget_fraction)
}

unsafe fn graph_ref<'a>(g: *const RewireGraph) -> Option<&'a Graph> {
    g.as_ref().map(|wrapper| &wrapper.0)
}

fn guarded(body: impl FnOnce() -> RewireStatus) -> RewireStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(RewireStatus::InternalError, "internal panic"),
    }
}

// ---------------------------------------------------------------------------
// graph lifecycle
// ---------------------------------------------------------------------------

/// Parse the `n <count>` / `i j` edge-list format.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_parse(
    text: *const c_char,
    out: *mut *mut RewireGraph,
) -> RewireStatus {
    if text.is_null() || out.is_null() {
        return fail(RewireStatus::NullPointer, "null argument");
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return fail(RewireStatus::ParseError, "text is not valid UTF-8");
    };
    match graph::parse_edge_list(text) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(RewireGraph(g)));
            RewireStatus::Ok
        }
        Err(e) => fail(RewireStatus::ParseError, e.to_string()),
    }
}

/// Generate a connected graph from one of the built-in families with the
/// parameters used throughout the engine (BA m=1/2, ER p=0.15, WS k=4
/// p=0.1).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_generate(
    model: RewireGraphModel,
    n: usize,
    seed: u64,
    out: *mut *mut RewireGraph,
) -> RewireStatus {
    if out.is_null() {
        return fail(RewireStatus::NullPointer, "null out pointer");
    }
    guarded(|| {
        let model = match model {
            RewireGraphModel::Ba1 => GraphModel::Ba { m: 1 },
            RewireGraphModel::Ba2 => GraphModel::Ba { m: 2 },
            RewireGraphModel::Er => GraphModel::Er { p: 0.15 },
            RewireGraphModel::Ws => GraphModel::Ws { k: 4, p: 0.1 },
        };
        match generate::generate(&GeneratorSpec { model, n, seed }) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(RewireGraph(g)));
                RewireStatus::Ok
            }
            Err(e) => fail(RewireStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_free(g: *mut RewireGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count; 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_node_count(g: *const RewireGraph) -> usize {
    graph_ref(g).map_or(0, Graph::n)
}

/// Edge count; 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_edge_count(g: *const RewireGraph) -> usize {
    graph_ref(g).map_or(0, Graph::m)
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_has_edge(g: *const RewireGraph, i: usize, j: usize) -> bool {
    graph_ref(g).is_some_and(|graph| graph.has_edge(i, j))
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_is_connected(g: *const RewireGraph) -> bool {
    graph_ref(g).is_some_and(Graph::is_connected)
}

/// Serialize to the canonical edge-list text; free with
/// `rewire_string_free`.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rewire_graph_serialize(
    g: *const RewireGraph,
    out: *mut *mut c_char,
) -> RewireStatus {
    if out.is_null() {
        return fail(RewireStatus::NullPointer, "null out pointer");
    }
    let Some(graph) = graph_ref(g) else {
        return fail(RewireStatus::NullPointer, "null graph handle");
    };
    let text = graph::serialize_edge_list(graph);
    match CString::new(text) {
        Ok(cstring) => {
            *out = cstring.into_raw();
            RewireStatus::Ok
        }
        Err(_) => fail(RewireStatus::InternalError, "serialized text contained NUL"),
    }
}

/// # Safety
/// `s` must have been returned by this library and not already freed.
#[no_mangle]
pub unsafe extern "C" fn rewire_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// objectives and episodes
// ---------------------------------------------------------------------------

/// Evaluate an objective on a graph (MERW requires connectivity).
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rewire_objective_evaluate(
    g: *const RewireGraph,
    objective: RewireObjective,
    out: *mut f64,
) -> RewireStatus {
    if out.is_null() {
        return fail(RewireStatus::NullPointer, "null out pointer");
    }
    let Some(graph) = graph_ref(g) else {
        return fail(RewireStatus::NullPointer, "null graph handle");
    };
    guarded(|| match objectives::evaluate(objective_kind(objective), graph) {
        Ok(value) => {
            *out = value;
            RewireStatus::Ok
        }
        Err(e) => fail(RewireStatus::ComputeError, e.to_string()),
    })
}

unsafe fn emit_episode(
    delta: Option<f64>,
    final_graph: Graph,
    out_delta: *mut f64,
    out_connected: *mut bool,
    out_final: *mut *mut RewireGraph,
) -> RewireStatus {
    if !out_delta.is_null() {
        *out_delta = delta.unwrap_or(f64::NAN);
    }
    if !out_connected.is_null() {
        *out_connected = delta.is_some();
    }
    if !out_final.is_null() {
        *out_final = Box::into_raw(Box::new(RewireGraph(final_graph)));
    }
    RewireStatus::Ok
}

/// One uniform-random rewiring episode. `out_delta` is NaN when the final
/// graph is disconnected; `out_final` (optional) receives the final graph.
///
/// # Safety
/// `g` must be a live handle; out pointers may each be null to skip them.
#[no_mangle]
pub unsafe extern "C" fn rewire_random_episode(
    g: *const RewireGraph,
    objective: RewireObjective,
    budget_fraction: f64,
    seed: u64,
    out_delta: *mut f64,
    out_connected: *mut bool,
    out_final: *mut *mut RewireGraph,
) -> RewireStatus {
    let Some(graph) = graph_ref(g) else {
        return fail(RewireStatus::NullPointer, "null graph handle");
    };
    guarded(|| {
        let cfg = env_config(objective, budget_fraction);
        match baselines::run_strategy(&Strategy::Random { seed }, graph, &cfg, None) {
            Ok(outcome) => {
                emit_episode(outcome.delta_f, outcome.final_graph, out_delta, out_connected, out_final)
            }
            Err(e) => fail(RewireStatus::ComputeError, e.to_string()),
        }
    })
}

/// One greedy episode; the final graph is always connected.
/// `timeout_ms = 0` disables the deadline; hitting it returns
/// `RewireStatus::Timeout`.
///
/// # Safety
/// `g` must be a live handle; out pointers may each be null to skip them.
#[no_mangle]
pub unsafe extern "C" fn rewire_greedy_episode(
    g: *const RewireGraph,
    objective: RewireObjective,
    budget_fraction: f64,
    timeout_ms: u64,
    out_delta: *mut f64,
    out_final: *mut *mut RewireGraph,
) -> RewireStatus {
    let Some(graph) = graph_ref(g) else {
        return fail(RewireStatus::NullPointer, "null graph handle");
    };
    guarded(|| {
        let cfg = env_config(objective, budget_fraction);
        let deadline = (timeout_ms > 0).then(|| Instant::now() + Duration::from_millis(timeout_ms));
        match baselines::greedy_episode_with_deadline(graph, &cfg, deadline) {
            Ok(outcome) => {
                if !out_delta.is_null() {
                    *out_delta = outcome.delta_f;
                }
                if !out_final.is_null() {
                    *out_final = Box::into_raw(Box::new(RewireGraph(outcome.final_graph)));
                }
                RewireStatus::Ok
            }
            Err(baselines::BaselineError::Timeout(elapsed)) => {
                fail(RewireStatus::Timeout, format!("greedy episode timed out after {elapsed:?}"))
            }
            Err(e) => fail(RewireStatus::ComputeError, e.to_string()),
        }
    })
}

/// One greedy-policy episode under a trained model.
///
/// # Safety
/// `model` and `g` must be live handles; out pointers may each be null.
#[no_mangle]
pub unsafe extern "C" fn rewire_policy_episode(
    model: *const RewireModel,
    g: *const RewireGraph,
    objective: RewireObjective,
    budget_fraction: f64,
    out_delta: *mut f64,
    out_connected: *mut bool,
    out_final: *mut *mut RewireGraph,
) -> RewireStatus {
    let Some(graph) = graph_ref(g) else {
        return fail(RewireStatus::NullPointer, "null graph handle");
    };
    let Some(model) = model.as_ref() else {
        return fail(RewireStatus::NullPointer, "null model handle");
    };
    guarded(|| {
        let cfg = env_config(objective, budget_fraction);
        match baselines::run_strategy(&Strategy::Policy(&model.0), graph, &cfg, None) {
            Ok(outcome) => {
                emit_episode(outcome.delta_f, outcome.final_graph, out_delta, out_connected, out_final)
            }
            Err(e) => fail(RewireStatus::ComputeError, e.to_string()),
        }
    })
}

// ---------------------------------------------------------------------------
// model checkpoints
// ---------------------------------------------------------------------------

/// Load a model checkpoint written by the training pipeline.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rewire_model_load(
    path: *const c_char,
    out: *mut *mut RewireModel,
) -> RewireStatus {
    if path.is_null() || out.is_null() {
        return fail(RewireStatus::NullPointer, "null argument");
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return fail(RewireStatus::InvalidArgument, "path is not valid UTF-8");
    };
    match gnn::load_checkpoint(Path::new(path)) {
        Ok(params) => {
            *out = Box::into_raw(Box::new(RewireModel(params)));
            RewireStatus::Ok
        }
        Err(gnn::GnnError::Io(msg)) => fail(RewireStatus::IoError, msg),
        Err(e) => fail(RewireStatus::ParseError, e.to_string()),
    }
}

/// # Safety
/// `model` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rewire_model_free(model: *mut RewireModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

// ---------------------------------------------------------------------------
// attack evaluation
// ---------------------------------------------------------------------------

/// Mean normalized attacker random-walk cost of the rewiring
/// `g0 -> g_star`, averaged over sampled entry nodes.
///
/// # Safety
/// `g0` and `g_star` must be live handles and `out_mean_normalized` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn rewire_attack_evaluate(
    g0: *const RewireGraph,
    g_star: *const RewireGraph,
    entry_rule: RewireEntryRule,
    hops: usize,
    seed: u64,
    out_mean_normalized: *mut f64,
) -> RewireStatus {
    use rand::SeedableRng;
    if out_mean_normalized.is_null() {
        return fail(RewireStatus::NullPointer, "null out pointer");
    }
    let (Some(g0), Some(g_star)) = (graph_ref(g0), graph_ref(g_star)) else {
        return fail(RewireStatus::NullPointer, "null graph handle");
    };
    guarded(|| {
        let rule = match entry_rule {
            RewireEntryRule::Synthetic => EntryRule::Synthetic,
            RewireEntryRule::All => EntryRule::AllNodes,
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        match attack::evaluate_rewiring(g0, g_star, rule, hops, &mut rng) {
            Ok(report) => {
                *out_mean_normalized = report.mean_normalized;
                RewireStatus::Ok
            }
            Err(e) => fail(RewireStatus::ComputeError, e.to_string()),
        }
    })
}
