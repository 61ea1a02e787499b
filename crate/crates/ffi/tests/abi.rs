use std::ffi::{CStr, CString};
use std::ptr;

use kleinlab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = kl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(kl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn embedding_round_trip() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { kl_embedding_new(2.0, 3, &mut e) }, KlStatus::Ok);
    assert!(kl_last_error_message().is_null());
    unsafe {
        assert_eq!(kl_embedding_len(e), 53);
        let n = kl_embedding_coords(e);
        assert_eq!(n, 53);
        assert!(kl_embedding_residual(e) <= 1e-8);

        let mut buf = vec![0.0; n];
        assert_eq!(kl_embedding_point(e, c("1").as_ptr(), buf.as_mut_ptr(), n), KlStatus::Ok);
        assert!((buf[0] - 1.0).abs() < 1e-12 && buf[1..].iter().all(|x| x.abs() < 1e-12));
        assert_eq!(kl_embedding_point(e, c("ab").as_ptr(), buf.as_mut_ptr(), n), KlStatus::Ok);
        let q: f64 = buf[0] * buf[0] - buf[1..].iter().map(|x| x * x).sum::<f64>();
        assert!((q - 1.0).abs() < 1e-8);
        assert_eq!(kl_embedding_point(e, c("ab").as_ptr(), buf.as_mut_ptr(), 2), KlStatus::OutOfRange);
        assert_eq!(kl_embedding_point(e, c("abab").as_ptr(), buf.as_mut_ptr(), n), KlStatus::NotFound);

        let mut d = 0.0;
        assert_eq!(kl_embedding_distance(e, c("a").as_ptr(), c("Bab").as_ptr(), &mut d), KlStatus::Ok);
        assert!((d - 16f64.acosh()).abs() < 1e-9);
        kl_embedding_free(e);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { kl_embedding_new(0.5, 2, &mut e) }, KlStatus::OutOfRange);
    assert!(e.is_null());
    assert!(last_error().contains("lambda"));
    assert_eq!(unsafe { kl_embedding_new(2.0, 2, ptr::null_mut()) }, KlStatus::NullPointer);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kl_gamma(c("aA").as_ptr(), &mut out) }, KlStatus::WordParse);
    assert_eq!(unsafe { kl_gamma(c("xyz").as_ptr(), &mut out) }, KlStatus::WordParse);
    assert_eq!(unsafe { kl_gamma(ptr::null(), &mut out) }, KlStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { kl_gamma(bad.as_ptr().cast(), &mut out) }, KlStatus::InvalidUtf8);
    assert!(out.is_null());

    unsafe {
        assert_eq!(kl_embedding_len(ptr::null()), 0);
        assert!(kl_embedding_residual(ptr::null()).is_nan());
        kl_embedding_free(ptr::null_mut());
        kl_string_free(ptr::null_mut());
    }
}

#[test]
fn words() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(kl_gamma(c("bAb").as_ptr(), &mut out), KlStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "BaB");
        kl_string_free(out);
        assert_eq!(kl_gamma(c("abA").as_ptr(), &mut out), KlStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "abA");
        kl_string_free(out);
        let mut d = 0;
        assert_eq!(kl_tree_dist(c("ab").as_ptr(), c("aB").as_ptr(), &mut d), KlStatus::Ok);
        assert_eq!(d, 2);
    }
}

#[test]
fn scenario_report() {
    let mut out = ptr::null_mut();
    let mut passed = -1;
    unsafe {
        assert_eq!(kl_scenario_json(c("h4").as_ptr(), 3, &mut out, &mut passed), KlStatus::Ok);
        let json = CStr::from_ptr(out).to_str().unwrap().to_owned();
        kl_string_free(out);
        assert_eq!(passed, 1);
        assert!(json.contains("\"scenario_name\": \"h4\""));
        assert!(json.contains("\"seed\": 3"));
        assert_eq!(kl_scenario_json(c("nope").as_ptr(), 0, &mut out, ptr::null_mut()), KlStatus::OutOfRange);
    }
}
