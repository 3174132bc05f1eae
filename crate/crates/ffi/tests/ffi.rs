use std::ffi::{CStr, CString};
use std::ptr;

use tripole_ffi::*;

fn field(l: &str, eps: &str) -> *mut TripoleField {
    let (l, eps) = (CString::new(l).unwrap(), CString::new(eps).unwrap());
    let mut h = ptr::null_mut();
    let s = unsafe { tripole_field_new(l.as_ptr(), eps.as_ptr(), &mut h) };
    assert_eq!(s, TripoleStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = tripole_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn origin_value_matches_the_closed_form() {
    let h = field("1", "1");
    let (mut u1, mut u2) = (0.0, 0.0);
    assert_eq!(unsafe { tripole_field_origin_value(h, &mut u1, &mut u2) }, TripoleStatus::Ok);
    // εL(√3 − 2, 1)/(1 − t²)
    let d = 1.0 - (2.0 - 3f64.sqrt()).powi(2);
    assert!((u1 - (3f64.sqrt() - 2.0) / d).abs() < 1e-15);
    assert!((u2 - 1.0 / d).abs() < 1e-15);
    unsafe { tripole_field_free(h) };
}

#[test]
fn eval_and_well_index() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { tripole_field_new_f64(1.0, 0.5, &mut h) }, TripoleStatus::Ok);
    let (mut u1, mut u2) = (0.0, 0.0);
    assert_eq!(unsafe { tripole_field_eval(h, 0.3, 0.1, &mut u1, &mut u2) }, TripoleStatus::Ok);
    assert!(u1.is_finite() && u2.is_finite());
    let mut w = 9u8;
    assert_eq!(unsafe { tripole_field_well_index(h, -0.9, 0.1, &mut w) }, TripoleStatus::Ok);
    assert_eq!(w, 1);
    assert_eq!(unsafe { tripole_field_well_index(h, 0.0, 0.0, &mut w) }, TripoleStatus::Ok);
    assert_eq!(w, 0);
    assert_eq!(unsafe { tripole_field_eval(h, 5.0, 0.0, &mut u1, &mut u2) }, TripoleStatus::OutsideDisk);
    assert!(last_error().contains("outside"));
    unsafe { tripole_field_free(h) };
}

#[test]
fn verify_counts_checks() {
    let h = field("1", "1");
    let (mut n, mut bad) = (0usize, 99usize);
    assert_eq!(unsafe { tripole_field_verify(h, 8, &mut n, &mut bad) }, TripoleStatus::Ok);
    assert!(n >= 300);
    assert_eq!(bad, 0);
    let z = CString::new("3/2√3,0,0").unwrap();
    assert_eq!(unsafe { tripole_field_set_rigid(h, z.as_ptr()) }, TripoleStatus::Ok);
    assert_eq!(unsafe { tripole_field_verify(h, 2, &mut n, ptr::null_mut()) }, TripoleStatus::Ok);
    unsafe { tripole_field_free(h) };
}

#[test]
fn checks_json_round_trips() {
    let h = field("1/2", "1/10");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tripole_field_checks_json(h, 1, &mut s) }, TripoleStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { tripole_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let checks = v.as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert!(checks.iter().any(|c| c["name"] == "rank_one:BA[1]"));
    unsafe { tripole_field_free(h) };
}

#[test]
fn bad_arguments_are_reported() {
    let mut h = ptr::null_mut();
    let (one, neg, junk) = (CString::new("1").unwrap(), CString::new("-1").unwrap(), CString::new("abc").unwrap());
    assert_eq!(unsafe { tripole_field_new(one.as_ptr(), neg.as_ptr(), &mut h) }, TripoleStatus::InvalidArgument);
    assert!(h.is_null());
    assert_eq!(unsafe { tripole_field_new(junk.as_ptr(), one.as_ptr(), &mut h) }, TripoleStatus::ParseError);
    assert_eq!(unsafe { tripole_field_new(ptr::null(), one.as_ptr(), &mut h) }, TripoleStatus::NullPointer);
    assert_eq!(unsafe { tripole_field_new_f64(f64::NAN, 1.0, &mut h) }, TripoleStatus::InvalidArgument);
    let (mut u1, mut u2) = (0.0, 0.0);
    assert_eq!(unsafe { tripole_field_eval(ptr::null(), 0.0, 0.0, &mut u1, &mut u2) }, TripoleStatus::NullPointer);
    unsafe {
        tripole_field_free(ptr::null_mut());
        tripole_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tripole.h")).unwrap();
    for f in [
        "tripole_field_new(",
        "tripole_field_new_f64(",
        "tripole_field_set_rigid(",
        "tripole_field_free(",
        "tripole_field_eval(",
        "tripole_field_well_index(",
        "tripole_field_origin_value(",
        "tripole_field_verify(",
        "tripole_field_checks_json(",
        "tripole_string_free(",
        "tripole_last_error(",
        "typedef struct TripoleField TripoleField;",
        "TRIPOLE_STATUS_VERIFICATION_FAILED = 5",
    ] {
        assert!(header.contains(f), "missing {f}");
    }
}
