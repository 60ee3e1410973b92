use std::ffi::{CStr, CString};
use std::ptr;

use mbverify_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(mbv_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn build_verify_and_read_report() {
    let mut case = ptr::null_mut();
    let st = unsafe {
        mbv_case_from_json(
            cstr("barnes1").as_ptr(),
            1,
            cstr(r#"{"a":[0.5,0.7],"b":[0.6,0.9]}"#).as_ptr(),
            &mut case,
        )
    };
    assert_eq!(st, MbvStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { mbv_case_dim(case) }, 1);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { mbv_case_rhs_log(case, &mut re, &mut im) }, MbvStatus::Ok);
    assert!((re.exp() - 0.438_203_228_463_031).abs() < 1e-12);

    let mut report = ptr::null_mut();
    assert_eq!(unsafe { mbv_verify(case, 1e-10, ptr::null(), 0, &mut report) }, MbvStatus::Ok);
    assert_eq!(unsafe { mbv_report_status(report) }, 0);
    let mut dev = f64::NAN;
    assert_eq!(unsafe { mbv_report_deviation(report, &mut dev) }, MbvStatus::Ok);
    assert!(dev < 1e-10);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { mbv_report_to_json(report, &mut json) }, MbvStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["identity"], "barnes1");
    unsafe {
        mbv_string_free(json);
        mbv_report_free(report);
        mbv_case_free(case);
    }
}

#[test]
fn sampled_case_matches_library() {
    let mut case = ptr::null_mut();
    assert_eq!(unsafe { mbv_case_sample(cstr("g2").as_ptr(), 1, 5, &mut case) }, MbvStatus::Ok);
    let direct = mbverify::catalog::build_sampled(mbverify::catalog::IdentityId::G2, 1, 5).unwrap();
    let (mut re, mut im) = (0.0, 0.0);
    unsafe { mbv_case_rhs_log(case, &mut re, &mut im) };
    assert_eq!((re, im), (direct.rhs_log.re, direct.rhs_log.im));
    unsafe { mbv_case_free(case) };
}

#[test]
fn errors_are_reported_with_codes() {
    let mut case = ptr::null_mut();
    let st = unsafe { mbv_case_sample(cstr("nope").as_ptr(), 1, 0, &mut case) };
    assert_eq!(st, MbvStatus::InvalidInput);
    assert!(last_error().contains("nope"));
    assert!(case.is_null());

    let st = unsafe {
        mbv_case_from_json(
            cstr("g3").as_ptr(),
            1,
            cstr(r#"{"alpha":[0.5,0.5],"beta":[0.1]}"#).as_ptr(),
            &mut case,
        )
    };
    assert_eq!(st, MbvStatus::InvalidInput);
    assert!(last_error().contains("constraint"));

    assert_eq!(
        unsafe { mbv_case_sample(ptr::null(), 1, 0, &mut case) },
        MbvStatus::NullPointer
    );
    assert_eq!(
        unsafe { mbv_case_sample(cstr("g1").as_ptr(), 1, 0, ptr::null_mut()) },
        MbvStatus::NullPointer
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { mbv_case_sample(bad.as_ptr().cast(), 1, 0, &mut case) },
        MbvStatus::InvalidString
    );
    assert_eq!(unsafe { mbv_report_status(ptr::null()) }, -1);
    assert_eq!(unsafe { mbv_case_dim(ptr::null()) }, 0);
    unsafe {
        mbv_case_free(ptr::null_mut());
        mbv_report_free(ptr::null_mut());
        mbv_string_free(ptr::null_mut());
    }
}

#[test]
fn log_gamma_and_pole() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { mbv_log_gamma(5.0, 0.0, &mut re, &mut im) }, MbvStatus::Ok);
    assert!((re - 24f64.ln()).abs() < 1e-13 && im.abs() < 1e-13);
    assert_eq!(unsafe { mbv_log_gamma(-2.0, 0.0, &mut re, &mut im) }, MbvStatus::Numerical);
}

#[test]
fn listing_is_json() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mbv_identity_list_json(&mut out) }, MbvStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { mbv_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 14);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mbverify.h")).unwrap();
    for name in [
        "mbv_last_error",
        "mbv_case_from_json",
        "mbv_case_sample",
        "mbv_case_dim",
        "mbv_case_rhs_log",
        "mbv_case_free",
        "mbv_verify",
        "mbv_report_status",
        "mbv_report_deviation",
        "mbv_report_to_json",
        "mbv_report_free",
        "mbv_string_free",
        "mbv_log_gamma",
        "mbv_identity_list_json",
        "typedef struct MbvCase MbvCase",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = [profile_dir.clone(), target.join("debug")]
        .into_iter()
        .map(|d| d.join("libmbverify_ffi.a"))
        .find(|p| p.exists())
        .expect("static library built alongside the tests");
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
