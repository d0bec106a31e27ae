use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qflat_ffi::*;

fn lattice(rows: &[i64], n: usize) -> *mut QflatLattice {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qflat_lattice_new(rows.as_ptr(), n, &mut out) }, QflatCode::Ok);
    out
}

#[test]
fn three_squares_miss_seven() {
    let l = lattice(&[1, 0, 0, 0, 1, 0, 0, 0, 1], 3);
    assert_eq!(unsafe { qflat_lattice_rank(l) }, 3);
    let mut rep = false;
    let mut v = [0i64; 3];
    assert_eq!(unsafe { qflat_represents_integer(l, 7, 0, &mut rep, v.as_mut_ptr()) }, QflatCode::Ok);
    assert!(!rep);
    assert_eq!(unsafe { qflat_represents_integer(l, 6, 0, &mut rep, v.as_mut_ptr()) }, QflatCode::Ok);
    assert!(rep);
    assert_eq!(v.iter().map(|x| x * x).sum::<i64>(), 6);
    unsafe { qflat_lattice_free(l) };
}

#[test]
fn lattice_embedding_is_written() {
    let t = lattice(&[1, 0, 0, 0, 1, 0, 0, 0, 1], 3);
    let s = lattice(&[2, 1, 1, 2], 2);
    let mut rep = false;
    let mut m = [0i64; 6];
    assert_eq!(unsafe { qflat_represents_lattice(t, s, 0, &mut rep, m.as_mut_ptr()) }, QflatCode::Ok);
    assert!(rep);
    let col = |j: usize| [m[j], m[2 + j], m[4 + j]];
    let dot = |a: [i64; 3], b: [i64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>();
    assert_eq!((dot(col(0), col(0)), dot(col(0), col(1)), dot(col(1), col(1))), (2, 1, 2));
    unsafe {
        qflat_lattice_free(t);
        qflat_lattice_free(s);
    }
}

#[test]
fn errors_are_reported() {
    let mut out = ptr::null_mut();
    let bad = [1i64, 2, 2, 1];
    assert_eq!(unsafe { qflat_lattice_new(bad.as_ptr(), 2, &mut out) }, QflatCode::NotPositiveDefinite);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(qflat_last_error()) }.to_str().unwrap().to_string();
    assert!(!msg.is_empty());
    assert_eq!(unsafe { qflat_lattice_new(ptr::null(), 2, &mut out) }, QflatCode::NullPointer);
    let text = CString::new("1 2; 3 4").unwrap();
    assert_eq!(unsafe { qflat_lattice_parse(text.as_ptr(), &mut out) }, QflatCode::InvalidInput);
    let l = lattice(&[3, 1, 1, 5], 2);
    let mut rep = false;
    assert_eq!(unsafe { qflat_represents_integer(l, 999_999_937, 1, &mut rep, ptr::null_mut()) }, QflatCode::BudgetExceeded);
    unsafe { qflat_lattice_free(l) };
    unsafe { qflat_lattice_free(ptr::null_mut()) };
}

#[test]
fn binary_reduction() {
    let mut out = [0i64; 3];
    let mut u = [0i64; 4];
    assert_eq!(unsafe { qflat_reduce_binary(6, 1, 1, out.as_mut_ptr(), u.as_mut_ptr()) }, QflatCode::Ok);
    assert_eq!(out, [1, 0, 5]);
    assert_eq!((u[0] * u[3] - u[1] * u[2]).abs(), 1);
}

#[test]
fn claims_round_trip() {
    let id = CString::new("phi9-preimages").unwrap();
    let mut status = QflatStatus::Fail;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qflat_verify_claim(id.as_ptr(), &mut status, &mut json) }, QflatCode::Ok);
    assert_eq!(status, QflatStatus::Pass);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    assert!(text.contains("\"claim\": \"phi9-preimages\""));
    unsafe { qflat_string_free(json) };
    let unknown = CString::new("nope").unwrap();
    assert_eq!(unsafe { qflat_verify_claim(unknown.as_ptr(), &mut status, &mut json) }, QflatCode::InvalidInput);
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qflat.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["qflat_lattice_new", "qflat_represents_integer", "qflat_verify_claim", "QFLAT_CODE_BUDGET_EXCEEDED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&header).status() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
