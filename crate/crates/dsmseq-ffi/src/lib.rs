//! C ABI over the sequencing core: opaque case handles, status codes, and
//! UTF-8 strings owned by this library (release with `dsm_string_free`).
//!
//! Conventions: every fallible call returns `DsmStatus` and writes results
//! through out-pointers only on `Ok`. On any failure a thread-local message
//! is set and readable via `dsm_last_error_message` until the next failing
//! call on the same thread. Passing NULL where not allowed is reported as
//! `NullArgument`, never undefined behavior.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dsmseq::eval::{feedback_count, Sequence};
use dsmseq::ga::{ga_run, GaPreset};
use dsmseq::metrics::network_metrics;
use dsmseq::rankers::{rank, RankerKind};
use dsmseq::{brute_force_optimum, load_case, randomize_ids, DsmCase, DEFAULT_NODE_LIMIT};

/// Result of every fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidCase = 3,
    InvalidSequence = 4,
    CaseTooLarge = 5,
    InvalidConfig = 6,
    Io = 7,
    Internal = 8,
}

/// Ranking method selector.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsmRanker {
    OutInDegree = 0,
    Eigenvector = 1,
    WalkExponential = 2,
    WalkResolvent = 3,
    Visibility = 4,
}

/// Genetic-algorithm preset selector.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsmGaPreset {
    Exploration = 0,
    Exploitation = 1,
    Balanced = 2,
}

/// Structural metrics of a dependency network.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsmMetrics {
    pub node_count: u32,
    pub edge_count: u32,
    pub density: f64,
    pub average_degree: f64,
    /// Longest shortest path on the undirected projection (largest
    /// component when disconnected).
    pub diameter: u32,
    pub clustering_coefficient: f64,
    pub average_path_length: f64,
    /// 1 when the undirected projection is a single connected component.
    pub projection_connected: u8,
}

/// Opaque dependency-network handle.
pub struct DsmCaseHandle {
    inner: DsmCase,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: DsmStatus, message: impl Into<Vec<u8>>) -> DsmStatus {
    let text = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
    status
}

/// Message describing the most recent failure on this thread, or NULL when
/// no call has failed yet. The pointer stays valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn dsm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, DsmStatus> {
    if ptr.is_null() {
        return Err(fail(DsmStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(DsmStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn guard(body: impl FnOnce() -> DsmStatus) -> DsmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(DsmStatus::Internal, "internal panic"),
    }
}

fn hand_out(case: DsmCase, out: *mut *mut DsmCaseHandle) -> DsmStatus {
    if out.is_null() {
        return fail(DsmStatus::NullArgument, "out handle pointer is NULL");
    }
    let boxed = Box::new(DsmCaseHandle { inner: case });
    unsafe { *out = Box::into_raw(boxed) };
    DsmStatus::Ok
}

fn hand_out_string(text: String, out: *mut *mut c_char) -> DsmStatus {
    if out.is_null() {
        return fail(DsmStatus::NullArgument, "out string pointer is NULL");
    }
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            DsmStatus::Ok
        }
        Err(_) => fail(DsmStatus::Internal, "result contained a NUL byte"),
    }
}

unsafe fn case_ref<'a>(handle: *const DsmCaseHandle) -> Result<&'a DsmCase, DsmStatus> {
    if handle.is_null() {
        return Err(fail(DsmStatus::NullArgument, "case handle is NULL"));
    }
    Ok(&(*handle).inner)
}

/// Parse a case from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_case_from_json(
    json: *const c_char,
    out: *mut *mut DsmCaseHandle,
) -> DsmStatus {
    guard(|| {
        let text = match read_str(json, "json") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match DsmCase::from_json(text) {
            Ok(case) => hand_out(case, out),
            Err(e) => fail(DsmStatus::InvalidCase, e.to_string()),
        }
    })
}

/// Load a case from a JSON file on disk.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_case_load(
    path: *const c_char,
    out: *mut *mut DsmCaseHandle,
) -> DsmStatus {
    guard(|| {
        let path = match read_str(path, "path") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match load_case(path) {
            Ok(case) => hand_out(case, out),
            Err(e @ dsmseq::CaseError::Io { .. }) => fail(DsmStatus::Io, e.to_string()),
            Err(e) => fail(DsmStatus::InvalidCase, e.to_string()),
        }
    })
}

/// Release a handle returned by any constructor. NULL is a no-op.
///
/// # Safety
/// `handle` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dsm_case_free(handle: *mut DsmCaseHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Release a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `text` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dsm_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Number of nodes, or 0 when `handle` is NULL.
///
/// # Safety
/// `handle` must be a live handle from this library (or NULL).
#[no_mangle]
pub unsafe extern "C" fn dsm_case_node_count(handle: *const DsmCaseHandle) -> u32 {
    case_ref(handle).map_or(0, |c| c.node_count() as u32)
}

/// Number of directed edges, or 0 when `handle` is NULL.
///
/// # Safety
/// `handle` must be a live handle from this library (or NULL).
#[no_mangle]
pub unsafe extern "C" fn dsm_case_edge_count(handle: *const DsmCaseHandle) -> u32 {
    case_ref(handle).map_or(0, |c| c.edge_count() as u32)
}

/// Copy of the case with fresh seeded random node ids (structure, names,
/// and descriptions preserved).
///
/// # Safety
/// `handle` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_case_randomize_ids(
    handle: *const DsmCaseHandle,
    seed: u64,
    out: *mut *mut DsmCaseHandle,
) -> DsmStatus {
    guard(|| {
        let case = match case_ref(handle) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match randomize_ids(case, seed) {
            Ok(fresh) => hand_out(fresh, out),
            Err(e) => fail(DsmStatus::InvalidCase, e.to_string()),
        }
    })
}

/// Count dependencies pointing backwards in `sequence` (comma-separated
/// node ids covering every node exactly once).
///
/// # Safety
/// `handle` must be a live handle; `sequence` a NUL-terminated string;
/// `out_feedback` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_feedback_count(
    handle: *const DsmCaseHandle,
    sequence: *const c_char,
    out_feedback: *mut u32,
) -> DsmStatus {
    guard(|| {
        let case = match case_ref(handle) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let text = match read_str(sequence, "sequence") {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out_feedback.is_null() {
            return fail(DsmStatus::NullArgument, "out_feedback is NULL");
        }
        match feedback_count(case, &Sequence::parse(text)) {
            Ok(score) => {
                *out_feedback = score;
                DsmStatus::Ok
            }
            Err(e) => fail(DsmStatus::InvalidSequence, e.to_string()),
        }
    })
}

/// Structural metrics of the network.
///
/// # Safety
/// `handle` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsm_network_metrics(
    handle: *const DsmCaseHandle,
    out: *mut DsmMetrics,
) -> DsmStatus {
    guard(|| {
        let case = match case_ref(handle) {
            Ok(c) => c,
            Err(status) => return status,
        };
        if out.is_null() {
            return fail(DsmStatus::NullArgument, "out metrics pointer is NULL");
        }
        let m = network_metrics(case);
        *out = DsmMetrics {
            node_count: m.node_count as u32,
            edge_count: m.edge_count as u32,
            density: m.density,
            average_degree: m.average_degree,
            diameter: m.diameter,
            clustering_coefficient: m.clustering_coefficient,
            average_path_length: m.average_path_length,
            projection_connected: m.projection_connected as u8,
        };
        DsmStatus::Ok
    })
}

/// Exhaustive minimum-feedback search. `node_limit` of 0 keeps the built-in
/// safety limit. Writes the optimal order (comma-separated, caller frees)
/// and its feedback count.
///
/// # Safety
/// `handle` must be a live handle; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dsm_brute_force_optimum(
    handle: *const DsmCaseHandle,
    node_limit: u32,
    out_order: *mut *mut c_char,
    out_feedback: *mut u32,
) -> DsmStatus {
    guard(|| {
        let case = match case_ref(handle) {
            Ok(c) => c,
            Err(status) => return status,
        };
        if out_feedback.is_null() {
            return fail(DsmStatus::NullArgument, "out_feedback is NULL");
        }
        let limit = if node_limit == 0 {
            DEFAULT_NODE_LIMIT
        } else {
            node_limit as usize
        };
        match brute_force_optimum(case, limit) {
            Ok((order, score)) => {
                let status = hand_out_string(order.to_comma_string(), out_order);
                if status == DsmStatus::Ok {
                    *out_feedback = score;
                }
                status
            }
            Err(e) => fail(DsmStatus::CaseTooLarge, e.to_string()),
        }
    })
}

/// Order the case with one deterministic ranking method. `delta` applies to
/// the resolvent walk only; pass NaN for the default damping.
///
/// # Safety
/// `handle` must be a live handle; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dsm_rank(
    handle: *const DsmCaseHandle,
    method: DsmRanker,
    delta: f64,
    seed: u64,
    out_order: *mut *mut c_char,
    out_feedback: *mut u32,
) -> DsmStatus {
    guard(|| {
        let case = match case_ref(handle) {
            Ok(c) => c,
            Err(status) => return status,
        };
        if out_feedback.is_null() {
            return fail(DsmStatus::NullArgument, "out_feedback is NULL");
        }
        let kind = match method {
            DsmRanker::OutInDegree => RankerKind::OutInDegree,
            DsmRanker::Eigenvector => RankerKind::Eigenvector,
            DsmRanker::WalkExponential => RankerKind::WalkExponential,
            DsmRanker::WalkResolvent => RankerKind::WalkResolvent,
            DsmRanker::Visibility => RankerKind::Visibility,
        };
        let delta = if delta.is_nan() { None } else { Some(delta) };
        match rank(case, kind, delta, seed) {
            Ok(order) => {
                let score = match feedback_count(case, &order) {
                    Ok(score) => score,
                    Err(e) => return fail(DsmStatus::Internal, e.to_string()),
                };
                let status = hand_out_string(order.to_comma_string(), out_order);
                if status == DsmStatus::Ok {
                    *out_feedback = score;
                }
                status
            }
            Err(e) => fail(DsmStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Run the genetic algorithm under a preset. `generations` of 0 keeps the
/// preset default. Writes the best order found and its feedback count.
///
/// # Safety
/// `handle` must be a live handle; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dsm_ga_run(
    handle: *const DsmCaseHandle,
    preset: DsmGaPreset,
    seed: u64,
    generations: u64,
    out_order: *mut *mut c_char,
    out_feedback: *mut u32,
) -> DsmStatus {
    guard(|| {
        let case = match case_ref(handle) {
            Ok(c) => c,
            Err(status) => return status,
        };
        if out_feedback.is_null() {
            return fail(DsmStatus::NullArgument, "out_feedback is NULL");
        }
        let preset = match preset {
            DsmGaPreset::Exploration => GaPreset::ExplorationFocused,
            DsmGaPreset::Exploitation => GaPreset::ExploitationFocused,
            DsmGaPreset::Balanced => GaPreset::Balanced,
        };
        let mut config = preset.config(seed);
        if generations > 0 {
            config.generations = generations as usize;
        }
        match ga_run(case, &config) {
            Ok((best, _)) => {
                let status = hand_out_string(best.sequence.to_comma_string(), out_order);
                if status == DsmStatus::Ok {
                    *out_feedback = best.score;
                }
                status
            }
            Err(e) => fail(DsmStatus::InvalidConfig, e.to_string()),
        }
    })
}
