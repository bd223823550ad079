//! C ABI over `rse-core`.
//!
//! Systems cross the boundary as opaque `RseSystem` handles. Every fallible
//! call returns an `RseStatus` and writes its result through an out pointer;
//! on failure `rse_last_error_message` describes the error on the calling
//! thread. Strings returned by the library are owned by the caller and must be
//! released with `rse_string_free`; handles with `rse_system_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rse_core::generate::{generate_dim, Profile};
use rse_core::mixing::{analyze, is_ergodic, is_weak_mixing};
use rse_core::schema::SystemFile;
use rse_core::tensor::tensor_ceps_capped;
use rse_core::{Ceps, Error};

/// Opaque handle to a validated system.
pub struct RseSystem {
    sys: Ceps,
    file: SystemFile,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSystem = 4,
    Precondition = 5,
    TooLarge = 6,
    InvalidArgument = 7,
    Defect = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RseStatus {
    match e {
        Error::Json(_) | Error::ParseRational(_) => RseStatus::Parse,
        Error::CesaroNotVanishing { .. } => RseStatus::Precondition,
        Error::TensorTooLarge { .. } | Error::PeriodTooLong(_) => RseStatus::TooLarge,
        Error::InvalidConfig(_) => RseStatus::InvalidArgument,
        Error::Defect(_) => RseStatus::Defect,
        _ => RseStatus::InvalidSystem,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (RseStatus, String)>) -> RseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RseStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside rse".into());
            RseStatus::Panic
        }
    }
}

fn core<T>(r: rse_core::Result<T>) -> Result<T, (RseStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (RseStatus, String) {
    (RseStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (RseStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (RseStatus::InvalidUtf8, e.to_string()))
}

unsafe fn system<'a>(h: *const RseSystem) -> Result<&'a RseSystem, (RseStatus, String)> {
    h.as_ref().ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (RseStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no interior nul").into_raw()
}

fn handle(sys: Ceps, file: SystemFile) -> *mut RseSystem {
    Box::into_raw(Box::new(RseSystem { sys, file }))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rse_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and validates a system JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_from_json(json: *const c_char, out: *mut *mut RseSystem) -> RseStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let file = core(SystemFile::parse(read_str(json)?))?;
        let sys = core(file.to_ceps())?;
        write_out(out, handle(sys, file))
    })
}

/// # Safety
/// `sys` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rse_system_free(sys: *mut RseSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_dimension(sys: *const RseSystem, out: *mut usize) -> RseStatus {
    guard(|| write_out(out, system(sys)?.sys.dimension()))
}

/// The canonical system JSON. Free the result with `rse_string_free`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_to_json(sys: *const RseSystem, out: *mut *mut c_char) -> RseStatus {
    guard(|| {
        let json = system(sys)?.file.to_json();
        write_out(out, into_c_string(json))
    })
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_is_ergodic(sys: *const RseSystem, out: *mut bool) -> RseStatus {
    guard(|| {
        let d = core(is_ergodic(&system(sys)?.sys))?;
        write_out(out, d.ergodic())
    })
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_is_weak_mixing(sys: *const RseSystem, out: *mut bool) -> RseStatus {
    guard(|| {
        let d = core(is_weak_mixing(&system(sys)?.sys))?;
        write_out(out, d.weak_mixing)
    })
}

/// Full mixing report as JSON. Free the result with `rse_string_free`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_analyze_json(sys: *const RseSystem, out: *mut *mut c_char) -> RseStatus {
    guard(|| {
        let report = core(analyze(&system(sys)?.sys))?;
        let json = serde_json::to_string(&report).map_err(|e| (RseStatus::Defect, e.to_string()))?;
        write_out(out, into_c_string(json))
    })
}

/// Tensor product `a ⊗ b`, refused when its dimension exceeds `max_dim`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_system_tensor(
    a: *const RseSystem,
    b: *const RseSystem,
    max_dim: usize,
    out: *mut *mut RseSystem,
) -> RseStatus {
    guard(|| {
        let (a, b) = (system(a)?, system(b)?);
        if out.is_null() {
            return Err(null());
        }
        let product = core(tensor_ceps_capped(&a.sys, &b.sys, max_dim))?;
        let file = SystemFile::tensor(&a.file, &b.file, &product);
        write_out(out, handle(product, file))
    })
}

/// A random valid system of dimension `dim`. `profile` is one of
/// `"block-permutation"`, `"global"`, `"identity"`.
///
/// # Safety
/// `profile` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rse_generate(
    seed: u64,
    dim: usize,
    profile: *const c_char,
    out: *mut *mut RseSystem,
) -> RseStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let profile: Profile = core(read_str(profile)?.parse())?;
        let sys = core(generate_dim(seed, dim, profile))?;
        let file = SystemFile::from_ceps(&sys);
        write_out(out, handle(sys, file))
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rse_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
