//! The C entry points, called from Rust exactly as C would call them.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use lgla_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lgla_last_error()) }.to_string_lossy().into_owned()
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { lgla_string_free(s) };
    out
}

fn build(name: &str, param: Option<&str>, radius: i64) -> *mut LglaStructure {
    let name = CString::new(name).unwrap();
    let param = param.map(|p| CString::new(p).unwrap());
    let mut h = ptr::null_mut();
    let st = unsafe { lgla_construct(name.as_ptr(), param.as_ref().map_or(ptr::null(), |p| p.as_ptr()), radius, &mut h) };
    assert_eq!(st, LglaStatus::Ok, "{}", last_error());
    h
}

#[test]
fn construct_check_and_classify() {
    let h = build("wpi", Some("1,0;0,i"), 3);
    let (mut rank, mut radius) = (0usize, 0i64);
    assert_eq!(unsafe { lgla_structure_info(h, &mut rank, &mut radius) }, LglaStatus::Ok);
    assert_eq!((rank, radius), (2, 3));

    let mut count = u64::MAX;
    assert_eq!(unsafe { lgla_check_jacobi(h, &mut count) }, LglaStatus::Ok);
    assert_eq!(count, 0);

    let mut kind = LglaClassKind::Inconclusive;
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { lgla_classify(h, &mut kind, &mut report) }, LglaStatus::Ok);
    assert_eq!(kind, LglaClassKind::NonIntegrable);
    let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
    assert_eq!(v["tag"], "non_integrable");
    unsafe { lgla_structure_free(h) };
}

#[test]
fn coefficients() {
    let h = build("witt", None, 4);
    let mut out = ptr::null_mut();
    let (a, b) = ([-1i64], [2i64]);
    assert_eq!(unsafe { lgla_coefficient(h, a.as_ptr(), b.as_ptr(), 1, &mut out) }, LglaStatus::Ok);
    assert_eq!(take(out), "3");
    let wrong = [0i64, 0];
    let st = unsafe { lgla_coefficient(h, wrong.as_ptr(), wrong.as_ptr(), 2, &mut out) };
    assert_eq!(st, LglaStatus::InvalidArgument);
    assert!(last_error().contains("rank"));
    unsafe { lgla_structure_free(h) };
}

#[test]
fn json_round_trip() {
    let h = build("a1_1", None, 6);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lgla_structure_to_json(h, &mut json) }, LglaStatus::Ok);
    let text = CString::new(take(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lgla_structure_from_json(text.as_ptr(), &mut back) }, LglaStatus::Ok);
    let mut kind = LglaClassKind::Inconclusive;
    assert_eq!(unsafe { lgla_classify(back, &mut kind, ptr::null_mut()) }, LglaStatus::Ok);
    assert_eq!(kind, LglaClassKind::Integrable);
    unsafe {
        lgla_structure_free(back);
        lgla_structure_free(h);
    }
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { lgla_construct(ptr::null(), ptr::null(), 1, &mut h) }, LglaStatus::NullPointer);
    let bogus = CString::new("bogus").unwrap();
    assert_eq!(unsafe { lgla_construct(bogus.as_ptr(), ptr::null(), 1, &mut h) }, LglaStatus::Parse);
    assert!(last_error().contains("bogus"));
    let wpi = CString::new("wpi").unwrap();
    assert_eq!(unsafe { lgla_construct(wpi.as_ptr(), ptr::null(), 1, &mut h) }, LglaStatus::Parse);
    let witt = CString::new("witt").unwrap();
    assert_eq!(unsafe { lgla_construct(witt.as_ptr(), ptr::null(), -1, &mut h) }, LglaStatus::InvalidArgument);
    let bad_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { lgla_construct(bad_utf8.as_ptr().cast(), ptr::null(), 1, &mut h) }, LglaStatus::InvalidUtf8);
    let junk = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { lgla_structure_from_json(junk.as_ptr(), &mut h) }, LglaStatus::Parse);
    let mut count = 0u64;
    assert_eq!(unsafe { lgla_check_jacobi(ptr::null(), &mut count) }, LglaStatus::NullPointer);
    // Success clears the message.
    let ok = build("witt", None, 1);
    assert_eq!(last_error(), "");
    unsafe {
        lgla_structure_free(ok);
        lgla_structure_free(ptr::null_mut());
        lgla_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(lgla_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
