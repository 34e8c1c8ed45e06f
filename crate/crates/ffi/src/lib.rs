//! C interface to `crlocal`.
//!
//! Representations cross the boundary as opaque handles built from JSON.
//! Every fallible function returns a [`CrlStatus`]; on failure the message is
//! available from [`crl_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crlocal::io::{parse_representation, representation_json};
use crlocal::reptheory::{is_cr, is_nonparabolic, semisimplify, Representation};
use crlocal::symspace::{minimize_displacement, Attainment};
use crlocal::Error;

/// Status codes. Library errors map one to one onto `Error::code()`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    RealHasNoValuation = 10,
    Singular = 11,
    WrongField = 12,
    FieldMismatch = 13,
    DimensionMismatch = 14,
    NotInvariant = 15,
    NotCr = 16,
    NotInBigCell = 17,
    NotParabolic = 18,
    NotUnipotent = 19,
    LeviMismatch = 20,
    NotRealField = 21,
    NotAttained = 22,
    PrimeMismatch = 23,
    BadT = 24,
    InvalidInput = 25,
    Parse = 26,
}

impl From<&Error> for CrlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::RealHasNoValuation => CrlStatus::RealHasNoValuation,
            Error::Singular => CrlStatus::Singular,
            Error::WrongField { .. } => CrlStatus::WrongField,
            Error::FieldMismatch(..) => CrlStatus::FieldMismatch,
            Error::DimensionMismatch(..) => CrlStatus::DimensionMismatch,
            Error::NotInvariant => CrlStatus::NotInvariant,
            Error::NotCr => CrlStatus::NotCr,
            Error::NotInBigCell(_) => CrlStatus::NotInBigCell,
            Error::NotParabolic(_) => CrlStatus::NotParabolic,
            Error::NotUnipotent => CrlStatus::NotUnipotent,
            Error::LeviMismatch(_) => CrlStatus::LeviMismatch,
            Error::NotRealField => CrlStatus::NotRealField,
            Error::NotAttained => CrlStatus::NotAttained,
            Error::PrimeMismatch(..) => CrlStatus::PrimeMismatch,
            Error::BadT(_) => CrlStatus::BadT,
            Error::InvalidInput(_) => CrlStatus::InvalidInput,
            Error::Parse(_) => CrlStatus::Parse,
        }
    }
}

/// Opaque handle to a finitely generated representation.
pub struct CrlRepresentation(Representation);

/// Outcome of the displacement minimization.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrlMinimizeResult {
    pub lambda: f64,
    /// 0 attained, 1 diverged, 2 budget exhausted.
    pub status: i32,
    pub iterations: usize,
    pub gradient_norm: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, records any failure and converts panics into [`CrlStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), CrlStatus>) -> CrlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CrlStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> CrlStatus {
    let s = CrlStatus::from(&e);
    set_error(format!("{}: {e}", e.code()));
    s
}

fn null(what: &str) -> CrlStatus {
    set_error(format!("null pointer: {what}"));
    CrlStatus::NullPointer
}

unsafe fn handle<'a>(rep: *const CrlRepresentation) -> Result<&'a Representation, CrlStatus> {
    rep.as_ref()
        .map(|r| &r.0)
        .ok_or_else(|| null("representation"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), CrlStatus> {
    if out.is_null() {
        return Err(null("output"));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("JSON has no interior NUL")
        .into_raw()
}

/// Parses a representation from a NUL-terminated JSON string.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer. The handle
/// must be released with [`crl_representation_free`].
#[no_mangle]
pub unsafe extern "C" fn crl_representation_from_json(
    json: *const c_char,
    out: *mut *mut CrlRepresentation,
) -> CrlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            set_error(format!("input is not UTF-8: {e}"));
            CrlStatus::InvalidUtf8
        })?;
        let rep = parse_representation(text).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(CrlRepresentation(rep))))
    })
}

/// # Safety
/// `rep` must come from [`crl_representation_from_json`] and not be used
/// afterwards. Null is accepted.
#[no_mangle]
pub unsafe extern "C" fn crl_representation_free(rep: *mut CrlRepresentation) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn crl_representation_dim(rep: *const CrlRepresentation) -> usize {
    rep.as_ref().map_or(0, |r| r.0.dim())
}

/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crl_is_cr(
    rep: *const CrlRepresentation,
    seed: u64,
    out: *mut bool,
) -> CrlStatus {
    guard(|| {
        let rho = handle(rep)?;
        write_out(out, is_cr(rho, seed))
    })
}

/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crl_is_nonparabolic(
    rep: *const CrlRepresentation,
    seed: u64,
    out: *mut bool,
) -> CrlStatus {
    guard(|| {
        let rho = handle(rep)?;
        write_out(out, is_nonparabolic(rho, seed).nonparabolic)
    })
}

/// Writes the semisimplification as JSON in the input format.
///
/// # Safety
/// `rep` must be a live handle and `out` writable. The string must be
/// released with [`crl_string_free`].
#[no_mangle]
pub unsafe extern "C" fn crl_semisimplify_json(
    rep: *const CrlRepresentation,
    seed: u64,
    out: *mut *mut c_char,
) -> CrlStatus {
    guard(|| {
        let rho = handle(rep)?;
        let text = representation_json(&semisimplify(rho, seed).rho_ss).to_string();
        write_out(out, to_c_string(text))
    })
}

/// Minimizes the displacement over the symmetric space (real inputs only).
///
/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crl_minimize(
    rep: *const CrlRepresentation,
    budget: usize,
    out: *mut CrlMinimizeResult,
) -> CrlStatus {
    guard(|| {
        let rho = handle(rep)?;
        let r = minimize_displacement(rho, budget).map_err(lib_err)?;
        let status = match r.status {
            Attainment::Attained => 0,
            Attainment::Diverged => 1,
            Attainment::Maxiter => 2,
        };
        write_out(
            out,
            CrlMinimizeResult {
                lambda: r.lambda_est,
                status,
                iterations: r.iterations,
                gradient_norm: r.gradient_norm,
            },
        )
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn crl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn crl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}
