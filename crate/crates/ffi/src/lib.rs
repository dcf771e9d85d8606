//! C interface to the analyzer.
//!
//! Every function returns a [`CoopanStatus`]; on failure the message is
//! available from [`coopan_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`coopan_string_free`]. Handles are released with
//! [`coopan_analysis_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coopan::abstraction::{PropertyId, DEFAULT_MAX_PROPERTIES};
use coopan::logicalc::export_logicalc;
use coopan::report::Report;
use coopan::{Analysis, AnalysisError};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopanStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidSpec = 4,
    TooManyProperties = 5,
    UnknownQuery = 6,
    NotAProperty = 7,
    NoInitial = 8,
    OutOfRange = 9,
    Internal = 10,
}

/// Analysis of one specification.
pub struct CoopanAnalysis {
    inner: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(CoopanStatus, String);

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let status = match &e {
            AnalysisError::Parse(_) => CoopanStatus::Syntax,
            AnalysisError::Invalid(_) | AnalysisError::Logic(_) => CoopanStatus::InvalidSpec,
            AnalysisError::Abstraction(_) => CoopanStatus::TooManyProperties,
            AnalysisError::UnknownQuery(_) => CoopanStatus::UnknownQuery,
            AnalysisError::NotAProperty(_) => CoopanStatus::NotAProperty,
            AnalysisError::NoInitial => CoopanStatus::NoInitial,
        };
        let message = match &e {
            AnalysisError::Invalid(diagnostics) => diagnostics
                .iter()
                .map(|d| format!("{}:{}: {}: {}", d.line, d.column, d.kind.as_str(), d.message))
                .collect::<Vec<_>>()
                .join("\n"),
            other => other.to_string(),
        };
        Failure(status, message)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CoopanStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CoopanStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal error");
            CoopanStatus::Internal
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure(CoopanStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(CoopanStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(ptr: *const CoopanAnalysis) -> Result<&'a Analysis, Failure> {
    ptr.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(CoopanStatus::NullArgument, "analysis handle is null".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(CoopanStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    let owned = CString::new(value.replace('\0', " ")).expect("no interior nul");
    put(out, owned.into_raw())
}

/// Parses and analyses `source`. `max_properties` of 0 selects the default
/// bound. On success `*out` receives a new handle.
///
/// # Safety
/// `source` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coopan_analysis_new(
    source: *const c_char,
    max_properties: usize,
    out: *mut *mut CoopanAnalysis,
) -> CoopanStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(CoopanStatus::NullArgument, "output pointer is null".into()));
        }
        let source = text(source, "source")?;
        let max = if max_properties == 0 { DEFAULT_MAX_PROPERTIES } else { max_properties };
        let inner = Analysis::from_source(source, max)?;
        put(out, Box::into_raw(Box::new(CoopanAnalysis { inner })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `analysis` must come from [`coopan_analysis_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn coopan_analysis_free(analysis: *mut CoopanAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// Number of context properties.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn coopan_property_count(analysis: *const CoopanAnalysis, out: *mut usize) -> CoopanStatus {
    guard(|| put(out, handle(analysis)?.space.len()))
}

/// Number of solvers.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn coopan_solver_count(analysis: *const CoopanAnalysis, out: *mut usize) -> CoopanStatus {
    guard(|| put(out, handle(analysis)?.solvers.len()))
}

fn check_property(a: &Analysis, id: usize) -> Result<PropertyId, Failure> {
    if id < a.space.len() {
        Ok(PropertyId(id))
    } else {
        Err(Failure(CoopanStatus::OutOfRange, format!("no property {id}")))
    }
}

/// Rendering of property `id`, e.g. `do(1) & ok(l)`.
///
/// # Safety
/// Pointers must be valid; free the result with [`coopan_string_free`].
#[no_mangle]
pub unsafe extern "C" fn coopan_property_render(
    analysis: *const CoopanAnalysis,
    id: usize,
    out: *mut *mut c_char,
) -> CoopanStatus {
    guard(|| {
        let a = handle(analysis)?;
        let id = check_property(a, id)?;
        put_string(out, a.render(id))
    })
}

/// Id of the property written as `expr`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn coopan_property_lookup(
    analysis: *const CoopanAnalysis,
    expr: *const c_char,
    out: *mut usize,
) -> CoopanStatus {
    guard(|| {
        let a = handle(analysis)?;
        let id = a.parse_property(text(expr, "expr")?)?;
        put(out, id.0)
    })
}

/// Image of property `id` under the solver at position `solver` (0-based,
/// ordered by solver index). Up to `capacity` ids are written to `ids`;
/// `*len` receives the full image size, so a call with `capacity` 0 sizes
/// the buffer.
///
/// # Safety
/// `ids` must have room for `capacity` entries (or be null when it is 0).
#[no_mangle]
pub unsafe extern "C" fn coopan_image(
    analysis: *const CoopanAnalysis,
    solver: usize,
    id: usize,
    ids: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> CoopanStatus {
    guard(|| {
        let a = handle(analysis)?;
        let id = check_property(a, id)?;
        let relation = a
            .solvers
            .get(solver)
            .ok_or_else(|| Failure(CoopanStatus::OutOfRange, format!("no solver at position {solver}")))?;
        let image = relation.image_of(id);
        if capacity > 0 && ids.is_null() {
            return Err(Failure(CoopanStatus::NullArgument, "ids is null".into()));
        }
        for (i, target) in image.iter().take(capacity).enumerate() {
            ids.add(i).write(target.0);
        }
        put(len, image.len())
    })
}

/// Feasible set as a JSON report. A null `initial` uses the
/// specification's `initial` declaration.
///
/// # Safety
/// Pointers must be valid; free the result with [`coopan_string_free`].
#[no_mangle]
pub unsafe extern "C" fn coopan_reach_json(
    analysis: *const CoopanAnalysis,
    initial: *const c_char,
    out: *mut *mut c_char,
) -> CoopanStatus {
    guard(|| {
        let a = handle(analysis)?;
        let c0 = if initial.is_null() { a.initial()? } else { a.parse_property(text(initial, "initial")?)? };
        let mut report = Report::with_properties(a);
        report.set_feasible(c0, a.feasible_from(c0).iter());
        put_string(out, report.to_json())
    })
}

/// Solutions of query `name` as a JSON report, evaluated on `jobs` threads.
///
/// # Safety
/// Pointers must be valid; free the result with [`coopan_string_free`].
#[no_mangle]
pub unsafe extern "C" fn coopan_query_json(
    analysis: *const CoopanAnalysis,
    name: *const c_char,
    jobs: usize,
    out: *mut *mut c_char,
) -> CoopanStatus {
    guard(|| {
        let a = handle(analysis)?;
        let name = text(name, "name")?;
        let solutions = a.solve_query(name, jobs.max(1))?;
        let mut report = Report::with_properties(a);
        report.add_query(name, &solutions);
        put_string(out, report.to_json())
    })
}

/// The constraint system in LogiCalc syntax.
///
/// # Safety
/// Pointers must be valid; free the result with [`coopan_string_free`].
#[no_mangle]
pub unsafe extern "C" fn coopan_export_logicalc(
    analysis: *const CoopanAnalysis,
    out: *mut *mut c_char,
) -> CoopanStatus {
    guard(|| {
        let a = handle(analysis)?;
        put_string(out, export_logicalc(&a.space, &a.solvers, &a.theory))
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on this thread.
#[no_mangle]
pub extern "C" fn coopan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn coopan_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
