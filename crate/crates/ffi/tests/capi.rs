use std::ffi::{CStr, CString};
use std::ptr;

use crlocal_ffi::*;

const UNIPOTENT: &str =
    r#"{"field":{"type":"padic","p":5},"n":2,"generators":{"a":[["1","1"],["0","1"]]}}"#;
const DIAG_REAL: &str =
    r#"{"field":{"type":"real"},"n":2,"generators":{"a":[[2.0,0.0],[0.0,0.5]]}}"#;

fn load(json: &str) -> *mut CrlRepresentation {
    let text = CString::new(json).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(
        unsafe { crl_representation_from_json(text.as_ptr(), &mut rep) },
        CrlStatus::Ok
    );
    assert!(!rep.is_null());
    rep
}

fn last_error() -> String {
    let p = crl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn unipotent_queries() {
    let rep = load(UNIPOTENT);
    unsafe {
        assert_eq!(crl_representation_dim(rep), 2);
        let mut flag = true;
        assert_eq!(crl_is_cr(rep, 0x5EED, &mut flag), CrlStatus::Ok);
        assert!(!flag);
        assert_eq!(crl_is_nonparabolic(rep, 0x5EED, &mut flag), CrlStatus::Ok);
        assert!(!flag);
        let mut s = ptr::null_mut();
        assert_eq!(crl_semisimplify_json(rep, 0x5EED, &mut s), CrlStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        crl_string_free(s);
        let ss = crlocal::io::parse_representation(&text).unwrap();
        assert!(ss.get("a").unwrap().is_identity());
        crl_representation_free(rep);
    }
}

#[test]
fn minimize_real_diagonal() {
    let rep = load(DIAG_REAL);
    let mut out = CrlMinimizeResult {
        lambda: -1.0,
        status: -1,
        iterations: 0,
        gradient_norm: 0.0,
    };
    unsafe {
        assert_eq!(crl_minimize(rep, 5000, &mut out), CrlStatus::Ok);
        crl_representation_free(rep);
    }
    assert_eq!(out.status, 0);
    // d(I, diag(4, 1/4)) = √2·ln 4
    let expected = 2f64.sqrt() * 4f64.ln();
    assert!(
        (out.lambda - expected).abs() < 1e-6,
        "{} vs {expected}",
        out.lambda
    );
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("{not json").unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(
        unsafe { crl_representation_from_json(bad.as_ptr(), &mut rep) },
        CrlStatus::Parse
    );
    assert!(rep.is_null());
    assert!(last_error().starts_with("PARSE"));

    let padic = load(UNIPOTENT);
    let mut out = CrlMinimizeResult {
        lambda: 0.0,
        status: 0,
        iterations: 0,
        gradient_norm: 0.0,
    };
    assert_eq!(
        unsafe { crl_minimize(padic, 100, &mut out) },
        CrlStatus::NotRealField
    );
    assert!(last_error().starts_with("NOT_REAL_FIELD"));

    let mut flag = false;
    assert_eq!(
        unsafe { crl_is_cr(ptr::null(), 1, &mut flag) },
        CrlStatus::NullPointer
    );
    assert_eq!(
        unsafe { crl_is_cr(padic, 1, ptr::null_mut()) },
        CrlStatus::NullPointer
    );
    assert_eq!(unsafe { crl_is_cr(padic, 1, &mut flag) }, CrlStatus::Ok);
    assert!(crl_last_error_message().is_null());
    unsafe {
        crl_representation_free(padic);
        crl_representation_free(ptr::null_mut());
        crl_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_rejected() {
    let bytes = CString::new(vec![0xffu8, 0xfe]).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(
        unsafe { crl_representation_from_json(bytes.as_ptr(), &mut rep) },
        CrlStatus::InvalidUtf8
    );
}

#[test]
fn header_declares_every_export() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let source = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(format!("{dir}/include/crlocal.h")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 9);
    for name in exports {
        assert!(
            header.contains(&format!(" {name}(")) || header.contains(&format!("*{name}(")),
            "{name} missing from header"
        );
    }
    for code in ["NOT_REAL_FIELD = 21", "PARSE = 26", "PANIC = 3"] {
        assert!(header.contains(code), "{code}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = format!("{}/include/crlocal.h", env!("CARGO_MANIFEST_DIR"));
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", &header])
        .status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}
