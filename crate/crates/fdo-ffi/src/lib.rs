//! C ABI over the fdo-core registry store, association queries, graph
//! export and metrics.
//!
//! Conventions:
//! - Stores are opaque handles created by `fdo_store_open` /
//!   `fdo_store_create` and released with `fdo_store_close`.
//! - Functions return `FdoStatus` (0 = ok); on failure a thread-local
//!   message is readable via `fdo_last_error_message` until the next call
//!   on the same thread.
//! - Output strings are allocated by this library and must be released
//!   with `fdo_string_free`.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use fdo_core::engine::{AssociationEngine, EngineError};
use fdo_core::graph::{build_graph, export_graph, ExportFormat};
use fdo_core::metrics::metrics_report;
use fdo_core::model::Model;
use fdo_core::pid::Pid;
use fdo_core::store::RegistryStore;

/// Status codes mirroring the CLI exit codes, plus argument errors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdoStatus {
    Ok = 0,
    Validation = 1,
    NotFound = 2,
    MetricsViolation = 3,
    InvalidArgument = 4,
}

/// Opaque registry-store handle.
pub struct FdoStore {
    store: RegistryStore,
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

fn status_of_engine_error(e: &EngineError) -> FdoStatus {
    match e {
        EngineError::UnknownPid(_) => FdoStatus::NotFound,
        _ => FdoStatus::Validation,
    }
}

/// # Safety
/// `s` must be a valid NUL-terminated string or null.
unsafe fn required_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, FdoStatus> {
    if s.is_null() {
        set_error(&format!("{what} is null"));
        return Err(FdoStatus::InvalidArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        FdoStatus::InvalidArgument
    })
}

fn parse_pid(s: &str) -> Result<Pid, FdoStatus> {
    Pid::parse(s).map_err(|e| {
        set_error(&e.to_string());
        FdoStatus::InvalidArgument
    })
}

fn emit(out: *mut *mut c_char, text: String) -> FdoStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return FdoStatus::InvalidArgument;
    }
    match CString::new(text.replace('\0', " ")) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            FdoStatus::Ok
        }
        Err(_) => {
            set_error("output contains interior NUL");
            FdoStatus::Validation
        }
    }
}

fn pid_lines(pids: &BTreeSet<Pid>) -> String {
    let mut text = String::new();
    for pid in pids {
        text.push_str(pid.as_str());
        text.push('\n');
    }
    text
}

/// Last error message for this thread; borrowed, valid until the next
/// library call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn fdo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn fdo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens an existing store. Returns null on failure.
///
/// # Safety
/// `root` must be a valid NUL-terminated path string.
#[no_mangle]
pub unsafe extern "C" fn fdo_store_open(root: *const c_char) -> *mut FdoStore {
    let Ok(root) = required_str(root, "store root") else {
        return ptr::null_mut();
    };
    match RegistryStore::open(Path::new(root)) {
        Ok(store) => Box::into_raw(Box::new(FdoStore { store })),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Creates an empty store for the given model (`record`, `profile` or
/// `attribute`). Returns null on failure.
///
/// # Safety
/// `root` and `model` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn fdo_store_create(
    root: *const c_char,
    model: *const c_char,
) -> *mut FdoStore {
    let Ok(root) = required_str(root, "store root") else {
        return ptr::null_mut();
    };
    let Ok(model) = required_str(model, "model") else {
        return ptr::null_mut();
    };
    let Some(model) = Model::parse(model) else {
        set_error(&format!("unknown model {model:?}"));
        return ptr::null_mut();
    };
    match RegistryStore::create(Path::new(root), model) {
        Ok(store) => Box::into_raw(Box::new(FdoStore { store })),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Releases a store handle. Null is a no-op.
///
/// # Safety
/// `handle` must have come from `fdo_store_open`/`fdo_store_create` and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fdo_store_close(handle: *mut FdoStore) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Writes the store's model name (`record`/`profile`/`attribute`) to `out`.
///
/// # Safety
/// `handle` must be a live store handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdo_store_model(
    handle: *const FdoStore,
    out: *mut *mut c_char,
) -> FdoStatus {
    let Some(handle) = handle.as_ref() else {
        set_error("store handle is null");
        return FdoStatus::InvalidArgument;
    };
    emit(out, handle.store.model().to_string())
}

unsafe fn with_engine<T>(
    handle: *const FdoStore,
    f: impl FnOnce(&AssociationEngine) -> Result<T, FdoStatus>,
) -> Result<T, FdoStatus> {
    let Some(handle) = handle.as_ref() else {
        set_error("store handle is null");
        return Err(FdoStatus::InvalidArgument);
    };
    let engine = AssociationEngine::new(handle.store.ecosystem().clone()).map_err(|e| {
        set_error(&e.to_string());
        status_of_engine_error(&e)
    })?;
    f(&engine)
}

/// Newline-separated sorted PIDs of operations associated with `fdo`.
///
/// # Safety
/// `handle` must be live; `fdo` a valid NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fdo_query_ops_for(
    handle: *const FdoStore,
    fdo: *const c_char,
    out: *mut *mut c_char,
) -> FdoStatus {
    let result = (|| {
        let fdo = parse_pid(required_str(fdo, "fdo pid")?)?;
        with_engine(handle, |engine| {
            engine.ops_for_fdo(&fdo).map_err(|e| {
                set_error(&e.to_string());
                status_of_engine_error(&e)
            })
        })
    })();
    match result {
        Ok(ops) => emit(out, pid_lines(&ops)),
        Err(status) => status,
    }
}

/// Newline-separated sorted PIDs of FDOs associated with `op`.
///
/// # Safety
/// `handle` must be live; `op` a valid NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fdo_query_fdos_for(
    handle: *const FdoStore,
    op: *const c_char,
    out: *mut *mut c_char,
) -> FdoStatus {
    let result = (|| {
        let op = parse_pid(required_str(op, "operation pid")?)?;
        with_engine(handle, |engine| {
            engine.fdos_for_op(&op).map_err(|e| {
                set_error(&e.to_string());
                status_of_engine_error(&e)
            })
        })
    })();
    match result {
        Ok(fdos) => emit(out, pid_lines(&fdos)),
        Err(status) => status,
    }
}

/// Sets `*out` to 1 if the pair is associated, 0 otherwise.
///
/// # Safety
/// `handle` must be live; `fdo`/`op` valid NUL-terminated strings; `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdo_query_check(
    handle: *const FdoStore,
    fdo: *const c_char,
    op: *const c_char,
    out: *mut i32,
) -> FdoStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return FdoStatus::InvalidArgument;
    }
    let result = (|| {
        let fdo = parse_pid(required_str(fdo, "fdo pid")?)?;
        let op = parse_pid(required_str(op, "operation pid")?)?;
        with_engine(handle, |engine| {
            engine.is_associated(&fdo, &op).map_err(|e| {
                set_error(&e.to_string());
                status_of_engine_error(&e)
            })
        })
    })();
    match result {
        Ok(answer) => {
            *out = i32::from(answer);
            FdoStatus::Ok
        }
        Err(status) => status,
    }
}

/// Exports the association graph; `dot` selects DOT output, anything else
/// the tab-separated edge list.
///
/// # Safety
/// `handle` must be live; `format` a valid NUL-terminated string; `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdo_graph_export(
    handle: *const FdoStore,
    format: *const c_char,
    out: *mut *mut c_char,
) -> FdoStatus {
    let Some(handle) = handle.as_ref() else {
        set_error("store handle is null");
        return FdoStatus::InvalidArgument;
    };
    let format = match required_str(format, "format") {
        Ok("dot") => ExportFormat::Dot,
        Ok(_) => ExportFormat::EdgeList,
        Err(status) => return status,
    };
    match build_graph(handle.store.ecosystem()) {
        Ok(graph) => emit(out, export_graph(&graph, format)),
        Err(e) => {
            set_error(&e.to_string());
            FdoStatus::Validation
        }
    }
}

/// Runs the metrics report and writes it as CSV. Returns
/// `MetricsViolation` (with the CSV still written) if any measure fails.
///
/// # Safety
/// `handle` must be live; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdo_metrics_csv(
    handle: *const FdoStore,
    seed: u64,
    sample: usize,
    out: *mut *mut c_char,
) -> FdoStatus {
    let Some(handle) = handle.as_ref() else {
        set_error("store handle is null");
        return FdoStatus::InvalidArgument;
    };
    match metrics_report(handle.store.ecosystem(), seed, sample) {
        Ok(report) => {
            let all_pass = report.all_pass();
            let status = emit(out, report.to_csv());
            if status != FdoStatus::Ok {
                status
            } else if all_pass {
                FdoStatus::Ok
            } else {
                set_error("one or more measures violated");
                FdoStatus::MetricsViolation
            }
        }
        Err(e) => {
            set_error(&e.to_string());
            FdoStatus::Validation
        }
    }
}
