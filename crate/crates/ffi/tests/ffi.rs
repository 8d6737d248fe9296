use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use densops_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn parse(src: &str, dim: usize) -> *mut DensopsOperator {
    let mut out = ptr::null_mut();
    assert_eq!(densops_operator_parse(c(src).as_ptr(), dim, &mut out), DensopsStatus::Ok);
    out
}

unsafe fn text(op: *const DensopsOperator) -> String {
    let mut s: *mut c_char = ptr::null_mut();
    assert_eq!(densops_operator_to_string(op, &mut s), DensopsStatus::Ok);
    let owned = CStr::from_ptr(s).to_str().unwrap().to_owned();
    densops_string_free(s);
    owned
}

unsafe fn last_error() -> String {
    CStr::from_ptr(densops_last_error_message()).to_str().unwrap().to_owned()
}

#[test]
fn lifting_round_trip() {
    unsafe {
        let op = parse("x1*d1*d1", 1);
        assert_eq!(densops_operator_dim(op), 1);
        let mut lift = ptr::null_mut();
        assert_eq!(densops_lift_canonical2(op, c("2").as_ptr(), &mut lift), DensopsStatus::Ok);
        assert_eq!(text(lift), "x1*d1^2 + 4/3*d1 - 2/3*d1*w");

        let mut back = ptr::null_mut();
        assert_eq!(densops_operator_restrict(lift, c("2").as_ptr(), &mut back), DensopsStatus::Ok);
        assert_eq!(text(back), "x1*d1^2");

        let mut adj = ptr::null_mut();
        assert_eq!(densops_operator_adjoint(lift, &mut adj), DensopsStatus::Ok);
        assert_eq!(text(adj), text(lift));

        for h in [op, lift, back, adj] {
            densops_operator_free(h);
        }
    }
}

#[test]
fn compose_json_and_other_lifts() {
    unsafe {
        let a = parse("d1", 1);
        let b = parse("x1", 1);
        let mut ab = ptr::null_mut();
        assert_eq!(densops_operator_compose(a, b, &mut ab), DensopsStatus::Ok);
        assert_eq!(text(ab), "x1*d1 + 1");

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(densops_operator_to_json(ab, &mut json), DensopsStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(densops_operator_from_json(json, &mut again), DensopsStatus::Ok);
        assert_eq!(text(again), "x1*d1 + 1");
        densops_string_free(json);

        let mut first = ptr::null_mut();
        let st = densops_lift_first_order(ab, c("1/3").as_ptr(), c("0").as_ptr(), c("1").as_ptr(), &mut first);
        assert_eq!(st, DensopsStatus::Ok);
        assert_eq!(text(first), "x1*d1 + 2/3 + w");

        let mut dlo = ptr::null_mut();
        assert_eq!(densops_lift_dlo(ab, c("1/3").as_ptr(), &mut dlo), DensopsStatus::Ok);
        assert_eq!(text(dlo), "x1*d1 + 2/3 + w");

        for h in [a, b, ab, again, first, dlo] {
            densops_operator_free(h);
        }
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(densops_operator_parse(c("d2").as_ptr(), 1, &mut out), DensopsStatus::EDim);
        assert_eq!(densops_operator_parse(c("x1 +").as_ptr(), 1, &mut out), DensopsStatus::EParse);
        assert!(last_error().contains("column"));
        assert_eq!(densops_operator_parse(ptr::null(), 1, &mut out), DensopsStatus::ENullPointer);
        assert!(out.is_null());

        let op = parse("x1*d1*d1", 1);
        assert_eq!(densops_lift_canonical2(op, c("1/2").as_ptr(), &mut out), DensopsStatus::ESingularWeight);
        assert!(last_error().contains("{0, 1/2, 1}"));
        assert_eq!(densops_lift_canonical2(op, c("0.5").as_ptr(), &mut out), DensopsStatus::EParse);
        assert_eq!(densops_operator_restrict(ptr::null(), c("1").as_ptr(), &mut out), DensopsStatus::ENullPointer);
        assert_eq!(densops_operator_adjoint(op, ptr::null_mut()), DensopsStatus::ENullPointer);
        let mut third = ptr::null_mut();
        let cubic = parse("d1^3", 1);
        assert_eq!(densops_lift_canonical2(cubic, c("2").as_ptr(), &mut third), DensopsStatus::EOrder);
        let mut adj = ptr::null_mut();
        assert_eq!(densops_operator_adjoint(op, &mut adj), DensopsStatus::Ok);
        assert_eq!(last_error(), "");

        let name = CStr::from_ptr(densops_status_name(DensopsStatus::ESingularWeight));
        assert_eq!(name.to_str().unwrap(), "E_SINGULAR_WEIGHT");
        densops_operator_free(ptr::null_mut());
        densops_string_free(ptr::null_mut());
        for h in [op, cubic, adj] {
            densops_operator_free(h);
        }
    }
}

#[test]
fn header_is_current_and_compiles() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/densops.h")).unwrap();
    for name in [
        "densops_operator_parse",
        "densops_operator_free",
        "densops_operator_to_json",
        "densops_string_free",
        "densops_lift_dlo",
        "DENSOPS_STATUS_E_SINGULAR_WEIGHT = 2",
        "typedef struct DensopsOperator DensopsOperator;",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // syntax-check a small C client when a compiler is around
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}
