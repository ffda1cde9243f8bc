//! C ABI over the rendezvous simulator.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free` function. Every fallible call returns an
//! [`RdvStatus`] and records a message readable through
//! [`rdv_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rendezvous_core::sim::trace::to_jsonl;
use rendezvous_core::{run_scenario, Error, InputError, RunOutput, Scenario, SimulationError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidScenario = 4,
    ProtocolViolation = 5,
    Panic = 6,
}

/// A validated scenario.
pub struct RdvScenario(Scenario);

/// The report and trace of one finished run.
pub struct RdvRun(RunOutput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = CString::new(message.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: RdvStatus, message: impl Into<String>) -> RdvStatus {
    set_error(message);
    status
}

fn status_of(e: &Error) -> RdvStatus {
    match e {
        Error::Input(InputError::Field { .. }) | Error::Json(_) => RdvStatus::ParseError,
        Error::Simulation(SimulationError::Protocol { .. }) => RdvStatus::ProtocolViolation,
        _ => RdvStatus::InvalidScenario,
    }
}

fn guarded(f: impl FnOnce() -> RdvStatus) -> RdvStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(RdvStatus::Panic, "internal panic"))
}

fn into_c_string(text: String) -> *mut c_char {
    match CString::new(text) {
        Ok(s) => s.into_raw(),
        Err(_) => {
            set_error("output contains a NUL byte");
            ptr::null_mut()
        }
    }
}

/// Parses and validates a scenario from NUL-terminated UTF-8 JSON.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a writable
/// pointer. On success `*out` receives a handle for [`rdv_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn rdv_scenario_from_json(
    json: *const c_char,
    out: *mut *mut RdvScenario,
) -> RdvStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(RdvStatus::NullArgument, "null argument");
        }
        // SAFETY: caller guarantees a NUL-terminated string
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(e) => return fail(RdvStatus::InvalidUtf8, e.to_string()),
        };
        match Scenario::from_json(text) {
            Ok(s) => {
                // SAFETY: checked non-null, caller guarantees writable
                unsafe { *out = Box::into_raw(Box::new(RdvScenario(s))) };
                RdvStatus::Ok
            }
            Err(e) => {
                let e = Error::from(e);
                fail(status_of(&e), e.to_string())
            }
        }
    })
}

/// # Safety
/// `scenario` must be null or a handle from [`rdv_scenario_from_json`]
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn rdv_scenario_free(scenario: *mut RdvScenario) {
    if !scenario.is_null() {
        // SAFETY: handle came from Box::into_raw
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Simulates the scenario to completion.
///
/// # Safety
/// `scenario` must be a live handle and `out` a writable pointer. On
/// success `*out` receives a handle for [`rdv_run_free`].
#[no_mangle]
pub unsafe extern "C" fn rdv_run(scenario: *const RdvScenario, out: *mut *mut RdvRun) -> RdvStatus {
    guarded(|| {
        if scenario.is_null() || out.is_null() {
            return fail(RdvStatus::NullArgument, "null argument");
        }
        // SAFETY: caller guarantees a live handle
        let s = unsafe { &(*scenario).0 };
        match run_scenario(s) {
            Ok(run) => {
                // SAFETY: checked non-null, caller guarantees writable
                unsafe { *out = Box::into_raw(Box::new(RdvRun(run))) };
                RdvStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// 1 if the agents met, 0 if not, -1 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdv_run_met(run: *const RdvRun) -> i32 {
    if run.is_null() {
        set_error("null argument");
        return -1;
    }
    // SAFETY: caller guarantees a live handle
    i32::from(unsafe { (*run).0.report.met })
}

/// Meeting report as pretty JSON; free with [`rdv_string_free`]. Null on
/// a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdv_run_report_json(run: *const RdvRun) -> *mut c_char {
    if run.is_null() {
        set_error("null argument");
        return ptr::null_mut();
    }
    // SAFETY: caller guarantees a live handle
    into_c_string(unsafe { (*run).0.report.to_json() })
}

/// Event trace, one JSON object per line; free with [`rdv_string_free`].
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdv_run_trace_jsonl(run: *const RdvRun) -> *mut c_char {
    if run.is_null() {
        set_error("null argument");
        return ptr::null_mut();
    }
    // SAFETY: caller guarantees a live handle
    into_c_string(to_jsonl(unsafe { &(*run).0.trace }))
}

/// # Safety
/// `run` must be null or a handle from [`rdv_run`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn rdv_run_free(run: *mut RdvRun) {
    if !run.is_null() {
        // SAFETY: handle came from Box::into_raw
        drop(unsafe { Box::from_raw(run) });
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdv_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: string came from CString::into_raw
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rdv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn rdv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
