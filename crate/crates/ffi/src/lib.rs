//! C ABI over the `ssdo-te` solver.
//!
//! Instances and results are opaque heap handles released with their
//! `_free` function. Every fallible call returns an [`SsdoStatus`]; on
//! failure [`ssdo_last_error`] describes the cause for the calling thread.
//! Strings crossing the boundary are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ssdo_te::problem::{resolve_form, solve, FormChoice, Instance, Split};
use ssdo_te::ssdo::{SolverConfig, SubproblemMode};
use ssdo_te::topology::io::{path_set_from_json, topology_from_json};
use ssdo_te::traffic::DemandMatrix;
use ssdo_te::TeError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsdoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or inconsistent input; same meaning as CLI exit code 3.
    InvalidInput = 3,
    /// A demanded pair has no usable path; same meaning as CLI exit code 4.
    Infeasible = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsdoForm {
    Auto = 0,
    Dense = 1,
    Path = 2,
}

/// Solver settings. Start from [`ssdo_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SsdoConfig {
    pub epsilon: f64,
    pub epsilon0: f64,
    /// Wall-clock budget in seconds; zero or negative means none.
    pub time_budget_s: f64,
    pub static_traversal: bool,
    pub greedy_subproblem: bool,
    pub form: SsdoForm,
}

/// Parsed and validated instance.
pub struct SsdoInstance {
    inner: Instance,
}

/// Outcome of one solve.
pub struct SsdoResult {
    final_mlu: f64,
    report_json: CString,
    split_json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(SsdoStatus, String);

impl From<TeError> for Failure {
    fn from(e: TeError) -> Self {
        let status = match e.root() {
            TeError::NoPath { .. } | TeError::Disconnects { .. } | TeError::NeverFeasible { .. } => {
                SsdoStatus::Infeasible
            }
            _ => SsdoStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SsdoStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsdoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SsdoStatus::Internal
        }
    }
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SsdoStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SsdoStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn to_cstring(s: String) -> CString {
    CString::new(s).expect("JSON output has no NUL bytes")
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ssdo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ssdo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn ssdo_config_default() -> SsdoConfig {
    let d = SolverConfig::default();
    SsdoConfig {
        epsilon: d.epsilon,
        epsilon0: d.epsilon0,
        time_budget_s: 0.0,
        static_traversal: d.static_traversal,
        greedy_subproblem: false,
        form: SsdoForm::Auto,
    }
}

/// Builds an instance from topology JSON, path-set JSON and dense demand
/// CSV, the same formats the CLI reads. On success `*out` owns a new handle.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ssdo_instance_new(
    topology_json: *const c_char,
    paths_json: *const c_char,
    demands_csv: *const c_char,
    out: *mut *mut SsdoInstance,
) -> SsdoStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(SsdoStatus::NullPointer, "out is null".into()));
        }
        let topology = topology_from_json(str_arg(topology_json, "topology_json")?)?;
        let paths = path_set_from_json(str_arg(paths_json, "paths_json")?, &topology)?;
        let demands = DemandMatrix::read_csv(str_arg(demands_csv, "demands_csv")?.as_bytes())?;
        let inner = Instance {
            topology,
            paths,
            demands,
        };
        inner.validate()?;
        *out = Box::into_raw(Box::new(SsdoInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `instance` is null or came from [`ssdo_instance_new`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn ssdo_instance_free(instance: *mut SsdoInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Solves `instance`. `config` may be null for defaults. `hot_split_json`
/// may be null for a cold start; `dual` races it against a cold start.
///
/// # Safety
/// Pointers are null or valid for their types; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ssdo_solve(
    instance: *const SsdoInstance,
    config: *const SsdoConfig,
    hot_split_json: *const c_char,
    dual: bool,
    out: *mut *mut SsdoResult,
) -> SsdoStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            return Err(Failure(SsdoStatus::NullPointer, "instance or out is null".into()));
        }
        let inst = &(*instance).inner;
        let c = if config.is_null() {
            ssdo_config_default()
        } else {
            *config
        };
        let solver = SolverConfig {
            epsilon: c.epsilon,
            epsilon0: c.epsilon0,
            time_budget: (c.time_budget_s > 0.0).then_some(c.time_budget_s),
            static_traversal: c.static_traversal,
            subproblem: if c.greedy_subproblem {
                SubproblemMode::GreedyVertex
            } else {
                SubproblemMode::Balanced
            },
        };
        let choice = match c.form {
            SsdoForm::Auto => FormChoice::Auto,
            SsdoForm::Dense => FormChoice::Dense,
            SsdoForm::Path => FormChoice::Path,
        };
        let form = resolve_form(choice, &inst.paths)?;
        let hot = if hot_split_json.is_null() {
            None
        } else {
            Some(Split::from_json(str_arg(hot_split_json, "hot_split_json")?, inst)?)
        };
        let sol = solve(inst, form, &solver, hot.as_ref(), dual)?;
        let report = serde_json::to_string_pretty(&sol.report).map_err(TeError::from)?;
        *out = Box::into_raw(Box::new(SsdoResult {
            final_mlu: sol.report.final_mlu,
            report_json: to_cstring(report),
            split_json: to_cstring(sol.split.to_json(inst)?),
        }));
        Ok(())
    })
}

/// Final MLU, or NaN for a null handle.
///
/// # Safety
/// `result` is null or a live handle from [`ssdo_solve`].
#[no_mangle]
pub unsafe extern "C" fn ssdo_result_mlu(result: *const SsdoResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.final_mlu)
}

/// Solve report as JSON, owned by `result`.
///
/// # Safety
/// `result` is null or a live handle from [`ssdo_solve`].
#[no_mangle]
pub unsafe extern "C" fn ssdo_result_report_json(result: *const SsdoResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.report_json.as_ptr())
}

/// Final split ratios as JSON in the CLI split-file format, owned by `result`.
///
/// # Safety
/// `result` is null or a live handle from [`ssdo_solve`].
#[no_mangle]
pub unsafe extern "C" fn ssdo_result_split_json(result: *const SsdoResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.split_json.as_ptr())
}

/// # Safety
/// `result` is null or came from [`ssdo_solve`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn ssdo_result_free(result: *mut SsdoResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
