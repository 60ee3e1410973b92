//! C ABI over the `mbverify` library.
//!
//! Cases and reports are opaque heap handles released with their `_free`
//! functions. Strings returned through out-parameters are owned by the
//! caller and released with [`mbv_string_free`]. Every function returns an
//! [`MbvStatus`]; on failure [`mbv_last_error`] describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mbverify::catalog::{build_identity_json, build_sampled, verify, IdentityCase, IdentityId, VerifyOptions};
use mbverify::quadrature::Method;
use mbverify::report::VerificationReport;
use mbverify::{Complex64, Error};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    /// Unknown identity, wrong parameter schema or violated constraint.
    InvalidInput = 3,
    /// Numerical failure such as a pole of Gamma at the inputs.
    Numerical = 4,
    Panic = 5,
}

/// Opaque identity case.
pub struct MbvCase {
    inner: IdentityCase,
}

/// Opaque verification report.
pub struct MbvReport {
    inner: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn classify(e: &Error) -> MbvStatus {
    match e {
        Error::UnknownIdentity(_)
        | Error::SchemaMismatch(_)
        | Error::ConstraintViolated(_)
        | Error::BadConfig(_)
        | Error::DomainViolation(_)
        | Error::BadSpin(_)
        | Error::Json(_) => MbvStatus::InvalidInput,
        _ => MbvStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), MbvStatus>) -> MbvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MbvStatus::Ok
        }
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic");
            MbvStatus::Panic
        }
    }
}

fn fail(e: Error) -> MbvStatus {
    set_error(&e.to_string());
    classify(&e)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, MbvStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(MbvStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        MbvStatus::InvalidString
    })
}

fn check_out<T>(p: *mut T) -> Result<(), MbvStatus> {
    if p.is_null() {
        set_error("null output pointer");
        Err(MbvStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn identity(name: &str) -> Result<IdentityId, MbvStatus> {
    name.parse().map_err(fail)
}

fn string_out(text: String, out: *mut *mut c_char) -> Result<(), MbvStatus> {
    let c = CString::new(text).map_err(|_| {
        set_error("output contains a NUL byte");
        MbvStatus::InvalidString
    })?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mbv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a case from a JSON parameter object.
///
/// # Safety
/// `identity_name` and `params_json` must be NUL-terminated strings; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_case_from_json(
    identity_name: *const c_char,
    n: usize,
    params_json: *const c_char,
    out: *mut *mut MbvCase,
) -> MbvStatus {
    guard(|| {
        check_out(out)?;
        let id = identity(read_str(identity_name)?)?;
        let value: serde_json::Value =
            serde_json::from_str(read_str(params_json)?).map_err(|e| fail(e.into()))?;
        let case = build_identity_json(id, n, &value).map_err(fail)?;
        *out = Box::into_raw(Box::new(MbvCase { inner: case }));
        Ok(())
    })
}

/// Build a case with seeded parameters.
///
/// # Safety
/// `identity_name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_case_sample(
    identity_name: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut MbvCase,
) -> MbvStatus {
    guard(|| {
        check_out(out)?;
        let id = identity(read_str(identity_name)?)?;
        let case = build_sampled(id, n, seed).map_err(fail)?;
        *out = Box::into_raw(Box::new(MbvCase { inner: case }));
        Ok(())
    })
}

/// Number of integration axes; 0 for a null handle.
///
/// # Safety
/// `case` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbv_case_dim(case: *const MbvCase) -> usize {
    case.as_ref().map_or(0, |c| c.inner.dim())
}

/// Complex logarithm of the closed-form right-hand side.
///
/// # Safety
/// `case` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_case_rhs_log(case: *const MbvCase, re: *mut f64, im: *mut f64) -> MbvStatus {
    guard(|| {
        check_out(re)?;
        check_out(im)?;
        let c = case.as_ref().ok_or_else(|| {
            set_error("null case");
            MbvStatus::NullPointer
        })?;
        *re = c.inner.rhs_log.re;
        *im = c.inner.rhs_log.im;
        Ok(())
    })
}

/// # Safety
/// `case` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbv_case_free(case: *mut MbvCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Integrate the left-hand side and compare with the right-hand side.
///
/// `method` may be null for automatic selection, otherwise one of
/// "auto", "line", "tensor", "qmc". A non-positive `rel_tol` selects
/// 1e-8.
///
/// # Safety
/// `case` must be a live handle, `method` null or a NUL-terminated string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_verify(
    case: *const MbvCase,
    rel_tol: f64,
    method: *const c_char,
    seed: u64,
    out: *mut *mut MbvReport,
) -> MbvStatus {
    guard(|| {
        check_out(out)?;
        let c = case.as_ref().ok_or_else(|| {
            set_error("null case");
            MbvStatus::NullPointer
        })?;
        let mut opts = VerifyOptions::with_rel_tol(if rel_tol > 0.0 { rel_tol } else { 1e-8 });
        if !method.is_null() {
            let m: Method = read_str(method)?.parse().map_err(fail)?;
            opts.quadrature.method = m;
        }
        opts.quadrature.seed = seed;
        let report = verify(&c.inner, &opts).map_err(fail)?;
        *out = Box::into_raw(Box::new(MbvReport { inner: report }));
        Ok(())
    })
}

/// Verdict as a process-style code: 0 pass, 1 fail, 2 inconclusive;
/// -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mbv_report_status(report: *const MbvReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.inner.exit_code())
}

/// Relative deviation |lhs/rhs - 1|; NaN when no estimate was produced.
///
/// # Safety
/// `report` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_report_deviation(report: *const MbvReport, out: *mut f64) -> MbvStatus {
    guard(|| {
        check_out(out)?;
        let r = report.as_ref().ok_or_else(|| {
            set_error("null report");
            MbvStatus::NullPointer
        })?;
        *out = r.inner.rel_deviation.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Full report as JSON.
///
/// # Safety
/// `report` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_report_to_json(report: *const MbvReport, out: *mut *mut c_char) -> MbvStatus {
    guard(|| {
        check_out(out)?;
        let r = report.as_ref().ok_or_else(|| {
            set_error("null report");
            MbvStatus::NullPointer
        })?;
        let text = serde_json::to_string(&r.inner).map_err(|e| fail(e.into()))?;
        string_out(text, out)
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbv_report_free(report: *mut MbvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Complex log Gamma(re + i im).
///
/// # Safety
/// `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_log_gamma(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> MbvStatus {
    guard(|| {
        check_out(out_re)?;
        check_out(out_im)?;
        let v = mbverify::gamma::log_gamma(Complex64::new(re, im)).map_err(fail)?;
        *out_re = v.re;
        *out_im = v.im;
        Ok(())
    })
}

/// Identity listing (ids, dimensions, schemas, constraints) as JSON.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mbv_identity_list_json(out: *mut *mut c_char) -> MbvStatus {
    guard(|| {
        check_out(out)?;
        string_out(mbverify::cli::listing().to_string(), out)
    })
}
