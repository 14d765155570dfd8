//! C ABI for `lgla`.
//!
//! Structures cross the boundary as opaque `LglaStructure` handles that own
//! a structure together with the box it is known on. Every entry point
//! returns an `LglaStatus`; results are written through out-pointers. On a
//! non-`OK` status, `lgla_last_error` describes the failure (per thread).
//! Strings returned by the library must be released with `lgla_string_free`,
//! handles with `lgla_structure_free`. Panics never unwind into C: they are
//! caught and reported as `LGLA_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lgla::catalog::{construct, CatalogName};
use lgla::classify::{classify, Classification};
use lgla::json::{structure_to_json, StructureFile, Symmetry};
use lgla::scalar_lie::check_jacobi;
use lgla::{LatticeBox, LatticePoint, ScalarStructure};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LglaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Computation = 5,
    Panic = 6,
}

/// Outcome of `lgla_classify`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LglaClassKind {
    Integrable = 0,
    NonIntegrable = 1,
    Inconclusive = 2,
}

/// A structure with the radius of the box its constants are known on.
pub struct LglaStructure {
    structure: ScalarStructure,
    radius: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(LglaStatus, String);

impl From<lgla::Error> for Fail {
    fn from(e: lgla::Error) -> Self {
        use lgla::Error as E;
        let status = match &e {
            E::Parse(_) | E::Json(_) | E::Malformed(_) => LglaStatus::Parse,
            E::InvalidParameter(_) | E::RankMismatch { .. } => LglaStatus::InvalidArgument,
            _ => LglaStatus::Computation,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LglaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LglaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            LglaStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(LglaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(LglaStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a>(h: *const LglaStructure) -> Result<&'a LglaStructure, Fail> {
    h.as_ref().ok_or_else(|| null("structure handle"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(LglaStatus::Computation, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Build a catalog algebra (`witt`, `gen_witt`, `wpi`, `a1_1`, `a2_2`,
/// `sl2_gamma3`, `sl3_gamma8`) on the box of the given radius. `param` holds
/// the generator images for `gen_witt` (`"1,i"`) and `wpi` (`"1,0;0,i"`) and
/// may be null otherwise.
///
/// # Safety
/// `name` and a non-null `param` must be NUL-terminated strings; `out` must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lgla_construct(
    name: *const c_char,
    param: *const c_char,
    radius: i64,
    out: *mut *mut LglaStructure,
) -> LglaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = text(name, "name")?;
        let param = if param.is_null() { None } else { Some(text(param, "param")?) };
        if radius < 0 {
            return Err(Fail(LglaStatus::InvalidArgument, "radius must be non-negative".into()));
        }
        let structure = construct(&CatalogName::from_spec(name, param)?)?;
        *out = Box::into_raw(Box::new(LglaStructure { structure, radius }));
        Ok(())
    })
}

/// Load a structure from interchange JSON; the handle's radius is the box
/// stored in the file.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lgla_structure_from_json(json: *const c_char, out: *mut *mut LglaStructure) -> LglaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let file = StructureFile::from_json(text(json, "json")?)?;
        let radius = file.radius;
        let structure = file.table(Symmetry::Antisymmetric)?.into_structure();
        *out = Box::into_raw(Box::new(LglaStructure { structure, radius }));
        Ok(())
    })
}

/// Serialize a structure on its box as interchange JSON.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid for writes. The string
/// written to `out` must be released with `lgla_string_free`.
#[no_mangle]
pub unsafe extern "C" fn lgla_structure_to_json(h: *const LglaStructure, out: *mut *mut c_char) -> LglaStatus {
    guard(|| {
        let h = handle(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_string(out, structure_to_json(&h.structure, &LatticeBox::new(h.radius))?)
    })
}

/// Rank of the grading group and radius of the box.
///
/// # Safety
/// `h` must be a live handle; non-null out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lgla_structure_info(h: *const LglaStructure, rank: *mut usize, radius: *mut i64) -> LglaStatus {
    guard(|| {
        let h = handle(h)?;
        if let Some(r) = rank.as_mut() {
            *r = h.structure.rank();
        }
        if let Some(r) = radius.as_mut() {
            *r = h.radius;
        }
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lgla_structure_free(h: *mut LglaStructure) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of Jacobi violations on the handle's box.
///
/// # Safety
/// `h` must be a live handle; `count` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lgla_check_jacobi(h: *const LglaStructure, count: *mut u64) -> LglaStatus {
    guard(|| {
        let h = handle(h)?;
        if count.is_null() {
            return Err(null("count"));
        }
        *count = check_jacobi(&h.structure, &LatticeBox::new(h.radius)).len() as u64;
        Ok(())
    })
}

/// Classify on the handle's box. The outcome is written to `kind`; if
/// `report` is non-null it receives the full JSON report.
///
/// # Safety
/// `h` must be a live handle; `kind` must be valid for writes; a non-null
/// `report` receives a string to be released with `lgla_string_free`.
#[no_mangle]
pub unsafe extern "C" fn lgla_classify(
    h: *const LglaStructure,
    kind: *mut LglaClassKind,
    report: *mut *mut c_char,
) -> LglaStatus {
    guard(|| {
        let h = handle(h)?;
        if kind.is_null() {
            return Err(null("kind"));
        }
        let c = classify(&h.structure, &LatticeBox::new(h.radius));
        *kind = match c {
            Classification::Integrable { .. } => LglaClassKind::Integrable,
            Classification::NonIntegrable { .. } => LglaClassKind::NonIntegrable,
            Classification::Inconclusive { .. } => LglaClassKind::Inconclusive,
        };
        if !report.is_null() {
            let json = serde_json::to_string(&c).map_err(|e| Fail(LglaStatus::Computation, e.to_string()))?;
            write_string(report, json)?;
        }
        Ok(())
    })
}

/// The structure constant c(λ, μ) in canonical text form (`"3/2-i"`), for
/// degrees given as `rank` coordinates each.
///
/// # Safety
/// `lam` and `mu` must point to `rank` readable `int64_t`s; `out` must be
/// valid for writes and receives a string for `lgla_string_free`.
#[no_mangle]
pub unsafe extern "C" fn lgla_coefficient(
    h: *const LglaStructure,
    lam: *const i64,
    mu: *const i64,
    rank: usize,
    out: *mut *mut c_char,
) -> LglaStatus {
    guard(|| {
        let h = handle(h)?;
        if lam.is_null() || mu.is_null() || out.is_null() {
            return Err(null("lam, mu or out"));
        }
        let s = &h.structure;
        if rank != s.rank() {
            return Err(Fail(LglaStatus::InvalidArgument, format!("rank {rank} given, structure has rank {}", s.rank())));
        }
        let a = s.group.canonical(&LatticePoint(std::slice::from_raw_parts(lam, rank).to_vec()));
        let b = s.group.canonical(&LatticePoint(std::slice::from_raw_parts(mu, rank).to_vec()));
        let c = if s.defined(&a, &b) { s.c(&a, &b) } else { lgla::Scalar::zero() };
        write_string(out, c.to_string())
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lgla_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Description of the last failure on the calling thread ("" after a
/// successful call). The pointer stays valid until the next call on the
/// same thread.
#[no_mangle]
pub extern "C" fn lgla_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn lgla_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
