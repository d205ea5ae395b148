use std::ffi::{CStr, CString};
use std::ptr;

use tensor_extremal_ffi::*;

const IDENTITY2: &str = r#"{"t":2,"shape":[2,2],"ones":[[0,0],[1,1]]}"#;

fn tensor(json: &str) -> *mut TeTensor {
    let json = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { te_tensor_from_json(json.as_ptr(), &mut out) }, TeStatus::Ok);
    out
}

fn pattern(json: &str) -> *mut TePattern {
    let json = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { te_pattern_from_json(json.as_ptr(), &mut out) }, TeStatus::Ok);
    out
}

fn last_error() -> String {
    let p = te_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { te_string_free(p) };
    s
}

#[test]
fn tensor_round_trip() {
    let json = r#"{"t":3,"shape":[2,3,2],"ones":[[0,0,1],[1,2,0]]}"#;
    let m = tensor(json);
    let mut ones = 0;
    assert_eq!(unsafe { te_tensor_ones(m, &mut ones) }, TeStatus::Ok);
    assert_eq!(ones, 2);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { te_tensor_to_json(m, &mut out) }, TeStatus::Ok);
    let again = tensor(&take_string(out));
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        te_tensor_to_json(m, &mut a);
        te_tensor_to_json(again, &mut b);
    }
    assert_eq!(take_string(a), take_string(b));
    unsafe {
        te_tensor_free(m);
        te_tensor_free(again);
    }
}

#[test]
fn containment() {
    let host = tensor(r#"{"t":2,"shape":[3,3],"ones":[[0,0],[0,1],[1,1],[1,2],[2,2]]}"#);
    let anti = tensor(r#"{"t":2,"shape":[2,2],"ones":[[0,1],[1,0]]}"#);
    let p = pattern(IDENTITY2);
    let mut found = false;
    assert_eq!(unsafe { te_contains(host, p, 0, &mut found) }, TeStatus::Ok);
    assert!(found);
    assert_eq!(unsafe { te_contains(anti, p, 0, &mut found) }, TeStatus::Ok);
    assert!(!found);
    unsafe {
        te_tensor_free(host);
        te_tensor_free(anti);
        te_pattern_free(p);
    }
}

#[test]
fn extremal_and_counting() {
    let p = pattern(IDENTITY2);
    let (mut value, mut witness) = (0usize, ptr::null_mut());
    assert_eq!(unsafe { te_f_exact(3, p, 0, 1, &mut value, &mut witness) }, TeStatus::Ok);
    assert_eq!(value, 5);
    assert!(!witness.is_null());
    let mut ones = 0;
    unsafe { te_tensor_ones(witness, &mut ones) };
    assert_eq!(ones, 5);
    let witness_host = witness;
    let mut found = true;
    assert_eq!(unsafe { te_contains(witness_host, p, 0, &mut found) }, TeStatus::Ok);
    assert!(!found);
    unsafe { te_tensor_free(witness) };

    assert_eq!(unsafe { te_f_exact(2, p, 0, 1, &mut value, ptr::null_mut()) }, TeStatus::Ok);
    assert_eq!(value, 3);

    let mut count = 0u64;
    assert_eq!(unsafe { te_count_avoiders(2, p, 1, &mut count) }, TeStatus::Ok);
    assert_eq!(count, 12);
    unsafe { te_pattern_free(p) };
}

#[test]
fn alpha_strings() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { te_alpha(2, 2, &mut out) }, TeStatus::Ok);
    assert_eq!(take_string(out), "192");
    assert_eq!(unsafe { te_alpha(3, 2, &mut out) }, TeStatus::Ok);
    assert_eq!(take_string(out), "3206175793348609/534362651099136");
    assert_eq!(unsafe { te_alpha(2, 1, &mut out) }, TeStatus::InvalidArgument);
}

#[test]
fn error_codes() {
    let mut t = ptr::null_mut();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { te_tensor_from_json(bad.as_ptr(), &mut t) }, TeStatus::Parse);
    assert!(last_error().contains("parse"));
    assert!(t.is_null());

    assert_eq!(unsafe { te_tensor_from_json(ptr::null(), &mut t) }, TeStatus::NullPointer);

    let mut p = ptr::null_mut();
    let row = CString::new(r#"{"t":2,"shape":[1,2],"ones":[[0,0],[0,1]]}"#).unwrap();
    assert_eq!(unsafe { te_pattern_from_json(row.as_ptr(), &mut p) }, TeStatus::NotAPattern);

    let oob = CString::new(r#"{"t":2,"shape":[2,2],"ones":[[0,2]]}"#).unwrap();
    assert_eq!(unsafe { te_tensor_from_json(oob.as_ptr(), &mut t) }, TeStatus::Parse);
    let unsorted = CString::new(r#"{"t":2,"shape":[2,2],"ones":[[1,1],[0,0]]}"#).unwrap();
    assert_eq!(unsafe { te_tensor_from_json(unsorted.as_ptr(), &mut t) }, TeStatus::Parse);
    assert!(last_error().contains("sorted"));

    let big = pattern(IDENTITY2);
    let mut value = 0usize;
    assert_eq!(unsafe { te_f_exact(9, big, 0, 1, &mut value, ptr::null_mut()) }, TeStatus::ResourceCap);
    assert!(last_error().contains("cap"));

    let mut found = false;
    assert_eq!(unsafe { te_contains(ptr::null(), big, 0, &mut found) }, TeStatus::NullPointer);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { te_alpha(2, 2, &mut out) }, TeStatus::Ok);
    assert!(te_last_error_message().is_null());
    unsafe {
        te_string_free(out);
        te_pattern_free(big);
        te_tensor_free(ptr::null_mut());
        te_string_free(ptr::null_mut());
    }
}

#[test]
fn version() {
    let v = unsafe { CStr::from_ptr(te_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
