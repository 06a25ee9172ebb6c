//! C ABI for the learning engine: parse a JSON run configuration, execute
//! it, and read the resulting trace through opaque handles.
//!
//! Conventions:
//! - Handles (`QhlRunConfig*`, `QhlTrace*`) are opaque; free them with the
//!   matching `*_free` function exactly once.
//! - Functions returning pointers yield NULL on failure; functions returning
//!   [`QhlStatus`] yield a nonzero code.  In both cases
//!   [`qhl_last_error_message`] describes the most recent failure on the
//!   calling thread.
//! - Strings returned as `char*` are owned by the caller and must be
//!   released with [`qhl_string_free`]; `const char*` returns are borrowed.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::ptr;

use qhl_core::harness::RunConfig;
use qhl_core::protocols::{marginal_likelihood_trace, QhlConfig, QhlEngine, TrialTrace};

/// Status codes returned by fallible accessors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    RunFailed = 4,
    IndexOutOfRange = 5,
    BufferTooSmall = 6,
    SerializationFailed = 7,
}

/// Opaque parsed run configuration.
#[repr(C)]
pub struct QhlRunConfig {
    _private: [u8; 0],
}

/// Opaque learning-run trace.
#[repr(C)]
pub struct QhlTrace {
    _private: [u8; 0],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Borrowed description of the most recent failure on this thread; valid
/// until the next failing call.  Never NULL.
#[no_mangle]
pub extern "C" fn qhl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Borrowed static version string.
#[no_mangle]
pub extern "C" fn qhl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, QhlStatus> {
    if ptr.is_null() {
        set_last_error("null string argument");
        return Err(QhlStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("argument is not valid UTF-8");
        QhlStatus::InvalidUtf8
    })
}

/// Parse a JSON run configuration.  `base_dir` resolves relative paths
/// inside the config (channel files) and may be NULL for the current
/// directory.  Returns NULL on failure.
///
/// # Safety
/// `json` must be a NUL-terminated C string; `base_dir` must be NULL or a
/// NUL-terminated C string.
#[no_mangle]
pub unsafe extern "C" fn qhl_config_parse(
    json: *const c_char,
    base_dir: *const c_char,
) -> *mut QhlRunConfig {
    let Ok(json) = cstr_arg(json) else {
        return ptr::null_mut();
    };
    let dir = if base_dir.is_null() {
        ".".to_string()
    } else {
        match cstr_arg(base_dir) {
            Ok(s) => s.to_string(),
            Err(_) => return ptr::null_mut(),
        }
    };
    let parsed = RunConfig::from_json(json).and_then(|cfg| cfg.to_qhl_config(Path::new(&dir)));
    match parsed {
        Ok(cfg) => Box::into_raw(Box::new(cfg)) as *mut QhlRunConfig,
        Err(e) => {
            set_last_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `config` must come from [`qhl_config_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qhl_config_free(config: *mut QhlRunConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config as *mut QhlConfig));
    }
}

/// Execute a learning run; returns NULL on failure.
///
/// # Safety
/// `config` must come from [`qhl_config_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qhl_run_execute(config: *const QhlRunConfig) -> *mut QhlTrace {
    if config.is_null() {
        set_last_error("null config");
        return ptr::null_mut();
    }
    let cfg = &*(config as *const QhlConfig);
    let run = QhlEngine::new(cfg.clone()).and_then(QhlEngine::run);
    match run {
        Ok(trace) => Box::into_raw(Box::new(trace)) as *mut QhlTrace,
        Err(e) => {
            set_last_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `trace` must come from [`qhl_run_execute`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_free(trace: *mut QhlTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace as *mut TrialTrace));
    }
}

unsafe fn trace_ref<'a>(trace: *const QhlTrace) -> Option<&'a TrialTrace> {
    if trace.is_null() {
        set_last_error("null trace");
        return None;
    }
    Some(&*(trace as *const TrialTrace))
}

/// Number of recorded experiments (0 for a NULL trace).
///
/// # Safety
/// `trace` must be NULL or a live handle from [`qhl_run_execute`].
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_len(trace: *const QhlTrace) -> usize {
    trace_ref(trace).map_or(0, |t| t.records.len())
}

/// Parameter-vector dimension of the estimate.
///
/// # Safety
/// `trace` must be NULL or a live handle from [`qhl_run_execute`].
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_param_dim(trace: *const QhlTrace) -> usize {
    trace_ref(trace).map_or(0, |t| t.final_estimate.len())
}

/// 1 when the run stopped early on an unrecoverable datum.
///
/// # Safety
/// `trace` must be NULL or a live handle from [`qhl_run_execute`].
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_aborted(trace: *const QhlTrace) -> i32 {
    trace_ref(trace).map_or(0, |t| i32::from(t.aborted))
}

/// Quadratic loss after experiment `index` (0-based).
///
/// # Safety
/// `trace` must be a live handle; `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_loss(
    trace: *const QhlTrace,
    index: usize,
    out: *mut f64,
) -> QhlStatus {
    let Some(t) = trace_ref(trace) else {
        return QhlStatus::NullArgument;
    };
    if out.is_null() {
        set_last_error("null output pointer");
        return QhlStatus::NullArgument;
    }
    match t.records.get(index) {
        Some(r) => {
            *out = r.loss;
            QhlStatus::Ok
        }
        None => {
            set_last_error(format!(
                "index {index} out of range for {} records",
                t.records.len()
            ));
            QhlStatus::IndexOutOfRange
        }
    }
}

/// Cumulative log marginal likelihood after experiment `index` (0-based).
///
/// # Safety
/// `trace` must be a live handle; `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_log_evidence(
    trace: *const QhlTrace,
    index: usize,
    out: *mut f64,
) -> QhlStatus {
    let Some(t) = trace_ref(trace) else {
        return QhlStatus::NullArgument;
    };
    if out.is_null() {
        set_last_error("null output pointer");
        return QhlStatus::NullArgument;
    }
    let cums = marginal_likelihood_trace(t);
    match cums.get(index) {
        Some(v) => {
            *out = *v;
            QhlStatus::Ok
        }
        None => {
            set_last_error(format!(
                "index {index} out of range for {} records",
                cums.len()
            ));
            QhlStatus::IndexOutOfRange
        }
    }
}

unsafe fn copy_vec(values: &[f64], buf: *mut f64, len: usize) -> QhlStatus {
    if buf.is_null() {
        set_last_error("null output buffer");
        return QhlStatus::NullArgument;
    }
    if len < values.len() {
        set_last_error(format!("buffer holds {len}, need {}", values.len()));
        return QhlStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    QhlStatus::Ok
}

/// Copy the final posterior-mean estimate into `buf` (length
/// [`qhl_trace_param_dim`]).
///
/// # Safety
/// `trace` must be a live handle; `buf` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_final_estimate(
    trace: *const QhlTrace,
    buf: *mut f64,
    len: usize,
) -> QhlStatus {
    let Some(t) = trace_ref(trace) else {
        return QhlStatus::NullArgument;
    };
    copy_vec(&t.final_estimate, buf, len)
}

/// Copy the data-generating parameters into `buf`.
///
/// # Safety
/// `trace` must be a live handle; `buf` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_true_params(
    trace: *const QhlTrace,
    buf: *mut f64,
    len: usize,
) -> QhlStatus {
    let Some(t) = trace_ref(trace) else {
        return QhlStatus::NullArgument;
    };
    copy_vec(&t.x_true, buf, len)
}

/// Serialize the full trace as JSON; free with [`qhl_string_free`].
/// Returns NULL on failure.
///
/// # Safety
/// `trace` must be NULL or a live handle from [`qhl_run_execute`].
#[no_mangle]
pub unsafe extern "C" fn qhl_trace_to_json(trace: *const QhlTrace) -> *mut c_char {
    let Some(t) = trace_ref(trace) else {
        return ptr::null_mut();
    };
    match serde_json::to_string(t) {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            set_last_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or an owned string returned by this library, freed at
/// most once.
#[no_mangle]
pub unsafe extern "C" fn qhl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
