//! C ABI over the displacement field and its verification.
//!
//! Every function returns a [`TripoleStatus`]; results are written through
//! out-pointers. The message of the last failure on the calling thread is
//! available from [`tripole_last_error`]. Strings returned by the library
//! must be released with [`tripole_string_free`], handles with
//! [`tripole_field_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tripole::cli::{verification_checks, Backend, Format, RunConfig};
use tripole::exactnum::QScalar;
use tripole::field::{well_of, DisplacementField, RigidMotion};
use tripole::geometry::{Location, TilingParams};
use tripole::linalg::Point2;
use tripole::wells::LandauParams;
use tripole::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripoleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    OutsideDisk = 4,
    VerificationFailed = 5,
    Panic = 6,
    Internal = 7,
}

/// Opaque field handle.
pub struct TripoleField {
    field: DisplacementField,
    l: QScalar,
    eps: QScalar,
    rigid: Option<RigidMotion>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TripoleStatus {
    match e {
        Error::Parse(_) => TripoleStatus::ParseError,
        Error::OutsideDisk(..) => TripoleStatus::OutsideDisk,
        Error::InvalidParameter(_) | Error::DivisionByZero | Error::NegativeDiscriminant(_) => {
            TripoleStatus::InvalidArgument
        }
        Error::NoJumpSolution(..) | Error::NotRankOne(_) => TripoleStatus::VerificationFailed,
        _ => TripoleStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (TripoleStatus, String)>) -> TripoleStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TripoleStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TripoleStatus::Panic
        }
    }
}

fn lib(e: Error) -> (TripoleStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (TripoleStatus, String) {
    (TripoleStatus::NullPointer, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (TripoleStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TripoleStatus::ParseError, format!("{name} is not UTF-8")))
}

unsafe fn handle<'a>(h: *const TripoleField) -> Result<&'a TripoleField, (TripoleStatus, String)> {
    h.as_ref().ok_or_else(|| null("field"))
}

fn build(l: QScalar, eps: QScalar) -> Result<TripoleField, (TripoleStatus, String)> {
    let params = TilingParams::new(l.clone(), 8).map_err(lib)?;
    let field = DisplacementField::new(params, eps.clone()).map_err(lib)?;
    Ok(TripoleField { field, l, eps, rigid: None })
}

fn store(out: *mut *mut TripoleField, f: TripoleField) {
    unsafe { *out = Box::into_raw(Box::new(f)) };
}

/// Creates a field from decimal, fractional or `a+b√3` strings for `L` and `ε`.
///
/// # Safety
/// `l` and `eps` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_new(l: *const c_char, eps: *const c_char, out: *mut *mut TripoleField) -> TripoleStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let l: QScalar = read_str(l, "l")?.parse().map_err(lib)?;
        let eps: QScalar = read_str(eps, "eps")?.parse().map_err(lib)?;
        store(out, build(l, eps)?);
        Ok(())
    })
}

/// Creates a field from the exact values of two doubles.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_new_f64(l: f64, eps: f64, out: *mut *mut TripoleField) -> TripoleStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let conv = |x: f64, name: &str| {
            QScalar::from_f64(x).ok_or_else(|| (TripoleStatus::InvalidArgument, format!("{name} is not finite")))
        };
        store(out, build(conv(l, "l")?, conv(eps, "eps")?)?);
        Ok(())
    })
}

/// Adds the rigid motion `z1,z2,z3` (given as a string) to the field.
///
/// # Safety
/// `h` must come from `tripole_field_new*`; `z` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_set_rigid(h: *mut TripoleField, z: *const c_char) -> TripoleStatus {
    guard(|| {
        let f = h.as_mut().ok_or_else(|| null("field"))?;
        let z = RigidMotion::parse(read_str(z, "z")?).map_err(lib)?;
        f.field = f.field.with_rigid_motion(z.clone());
        f.rigid = Some(z);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or come from `tripole_field_new*`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_free(h: *mut TripoleField) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Displacement at `(x, y)` in the closed disk.
///
/// # Safety
/// `h` must be a live handle; `u1`, `u2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_eval(h: *const TripoleField, x: f64, y: f64, u1: *mut f64, u2: *mut f64) -> TripoleStatus {
    guard(|| {
        let f = handle(h)?;
        if u1.is_null() || u2.is_null() {
            return Err(null("output"));
        }
        let u = f.field.eval_u_f64(&Point2::new(x, y)).map_err(lib)?;
        *u1 = u.x;
        *u2 = u.y;
        Ok(())
    })
}

/// Well (1, 2, 3) at `(x, y)`; 0 on an interface, at the origin or outside the disk.
///
/// # Safety
/// `h` must be a live handle; `well` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_well_index(h: *const TripoleField, x: f64, y: f64, well: *mut u8) -> TripoleStatus {
    guard(|| {
        let f = handle(h)?;
        if well.is_null() {
            return Err(null("well"));
        }
        *well = match f.field.geometry_f64().locate(&Point2::new(x, y)) {
            Location::Region(id) | Location::Boundary(id) => well_of(id.family),
            _ => 0,
        };
        Ok(())
    })
}

/// Limit value of the field at the origin.
///
/// # Safety
/// `h` must be a live handle; `u1`, `u2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_origin_value(h: *const TripoleField, u1: *mut f64, u2: *mut f64) -> TripoleStatus {
    guard(|| {
        let f = handle(h)?;
        if u1.is_null() || u2.is_null() {
            return Err(null("output"));
        }
        let u = f.field.origin_value().to_f64();
        *u1 = u.x;
        *u2 = u.y;
        Ok(())
    })
}

fn config(f: &TripoleField, kmax: u32) -> RunConfig {
    RunConfig {
        l: f.l.clone(),
        epsilon: f.eps.clone(),
        kmax,
        grid: 2,
        format: Format::Json,
        rigid: f.rigid.clone(),
        landau: LandauParams::default(),
        backend: Backend::Exact,
    }
}

/// Runs every exact check up to generation `kmax`. Returns
/// `VerificationFailed` if any check fails; the counts are written either way.
///
/// # Safety
/// `h` must be a live handle; `checks` and `failed` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_verify(h: *const TripoleField, kmax: u32, checks: *mut usize, failed: *mut usize) -> TripoleStatus {
    guard(|| {
        let f = handle(h)?;
        let all = verification_checks(&config(f, kmax), None).map_err(lib)?;
        let bad: Vec<_> = all.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect();
        if let Some(n) = checks.as_mut() {
            *n = all.len();
        }
        if let Some(n) = failed.as_mut() {
            *n = bad.len();
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err((TripoleStatus::VerificationFailed, format!("failed: {}", bad.join(", "))))
        }
    })
}

/// The checks as a JSON array. Release the string with `tripole_string_free`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tripole_field_checks_json(h: *const TripoleField, kmax: u32, out: *mut *mut c_char) -> TripoleStatus {
    guard(|| {
        let f = handle(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let all = verification_checks(&config(f, kmax), None).map_err(lib)?;
        let text = serde_json::to_string(&all).map_err(|e| (TripoleStatus::Internal, e.to_string()))?;
        *out = CString::new(text).map_err(|e| (TripoleStatus::Internal, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tripole_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tripole_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
