//! C ABI over `wlab`.
//!
//! Data are held behind an opaque `WlabData` handle. Every fallible call
//! returns a `WlabStatus`; on failure the message is available from
//! `wlab_last_error` until the next call on the same thread. Strings
//! returned by the library are freed with `wlab_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use wlab::config::Tolerances;
use wlab::curvature::gauss_curvature;
use wlab::error::Error;
use wlab::ramification::ramification_report;
use wlab::report::{cmd_report, InputDocument};
use wlab::weierstrass::{metric_factor, WeierstrassData};

/// Status codes; `WLAB_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidData = 4,
    SingularPoint = 5,
    MathError = 6,
    ConstantComponent = 7,
    Panic = 8,
}

/// Parsed Weierstrass data and the tolerances in effect.
pub struct WlabData {
    input: InputDocument,
    data: WeierstrassData,
    tol: Tolerances,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> WlabStatus {
    match e {
        Error::Parse(_) | Error::Field { .. } => WlabStatus::ParseError,
        Error::InvalidData(_) | Error::Io(_) | Error::Mesh(_) => WlabStatus::InvalidData,
        Error::SingularPoint(_) | Error::BranchPoint(_) => WlabStatus::SingularPoint,
        _ => WlabStatus::MathError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (WlabStatus, String)>) -> WlabStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WlabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WlabStatus::Panic
        }
    }
}

fn fail(e: Error) -> (WlabStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (WlabStatus, String) {
    (WlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (WlabStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (WlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(d: *const WlabData) -> Result<&'a WlabData, (WlabStatus, String)> {
    d.as_ref().ok_or_else(|| null("data handle"))
}

/// Parses an input document (`{"genus", "punctures", "h", "g1", "g2"}`).
/// Tolerances are the defaults scaled by `WLAB_TOLERANCE_SCALE`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wlab_data_from_json(
    json: *const c_char,
    out: *mut *mut WlabData,
) -> WlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let tol = Tolerances::from_env();
        let input = InputDocument::from_json(text).map_err(fail)?;
        let data = input.to_data(&tol).map_err(fail)?;
        *out = Box::into_raw(Box::new(WlabData { input, data, tol }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `d` must come from `wlab_data_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wlab_data_free(d: *mut WlabData) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of punctures.
///
/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wlab_data_puncture_count(d: *const WlabData) -> usize {
    d.as_ref().map_or(0, |d| d.data.k())
}

/// Metric factor `lambda^2` at `re + i im`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wlab_metric_factor(
    d: *const WlabData,
    re: f64,
    im: f64,
    out: *mut f64,
) -> WlabStatus {
    guard(|| {
        let d = handle(d)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = metric_factor(&d.data, Complex64::new(re, im), &d.tol).map_err(fail)?;
        Ok(())
    })
}

/// Gauss curvature at `re + i im`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wlab_gauss_curvature(
    d: *const WlabData,
    re: f64,
    im: f64,
    out: *mut f64,
) -> WlabStatus {
    guard(|| {
        let d = handle(d)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = gauss_curvature(&d.data, Complex64::new(re, im), &d.tol).map_err(fail)?;
        Ok(())
    })
}

/// Totally ramified value number of component 1 or 2 as `num / den`.
///
/// # Safety
/// `d` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wlab_nu_f(
    d: *const WlabData,
    component: u32,
    num: *mut i64,
    den: *mut i64,
) -> WlabStatus {
    guard(|| {
        let d = handle(d)?;
        let (num, den) = match (num.as_mut(), den.as_mut()) {
            (Some(n), Some(m)) => (n, m),
            _ => return Err(null("out")),
        };
        let g = match component {
            1 => &d.data.g1,
            2 => &d.data.g2,
            c => {
                return Err((
                    WlabStatus::InvalidData,
                    format!("component must be 1 or 2, got {c}"),
                ))
            }
        };
        if g.is_constant() {
            return Err((
                WlabStatus::ConstantComponent,
                format!("g{component} is constant"),
            ));
        }
        let r = ramification_report(g, &d.data.punctures, d.data.genus, &d.tol).map_err(fail)?;
        *num = *r.nu_f.0.numer();
        *den = *r.nu_f.0.denom();
        Ok(())
    })
}

/// Full JSON report (schema 1). The string is owned by the caller and
/// released with `wlab_string_free`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wlab_report_json(
    d: *const WlabData,
    seed: u64,
    out: *mut *mut c_char,
) -> WlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let d = handle(d)?;
        let doc = cmd_report(&d.input, &d.tol, seed).map_err(fail)?;
        let s = CString::new(doc.to_json())
            .map_err(|_| (WlabStatus::Panic, "report contains NUL".to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn wlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn wlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
