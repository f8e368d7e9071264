use std::ffi::{CStr, CString};
use std::ptr;

use num_complex::Complex64;
use wlab_ffi::*;

fn fixture(name: &str) -> CString {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/");
    CString::new(std::fs::read_to_string(format!("{path}{name}.json")).unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(wlab_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn load(name: &str) -> *mut WlabData {
    let json = fixture(name);
    let mut d = ptr::null_mut();
    let s = unsafe { wlab_data_from_json(json.as_ptr(), &mut d) };
    assert_eq!(s, WlabStatus::Ok, "{}", last_error());
    assert!(!d.is_null());
    d
}

#[test]
fn round_trip_through_the_handle() {
    let d = load("example21");
    unsafe {
        assert_eq!(wlab_data_puncture_count(d), 4);

        let z = Complex64::new(0.3, 0.7);
        let h = 1.0 / ((z - 1.0) * (z - 2.0) * (z - 3.0));
        let want = 0.25 * h.norm_sqr() * (1.0 + z.norm_sqr()).powi(2);
        let mut got = 0.0;
        assert_eq!(wlab_metric_factor(d, z.re, z.im, &mut got), WlabStatus::Ok);
        assert!((got - want).abs() <= 1e-13 * want);

        let mut k = 0.0;
        assert_eq!(wlab_gauss_curvature(d, z.re, z.im, &mut k), WlabStatus::Ok);
        assert!(k < 0.0);

        let (mut num, mut den) = (0i64, 0i64);
        assert_eq!(wlab_nu_f(d, 1, &mut num, &mut den), WlabStatus::Ok);
        assert_eq!((num, den), (4, 1));

        let mut s = ptr::null_mut();
        assert_eq!(wlab_report_json(d, 20240611, &mut s), WlabStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        wlab_string_free(s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "report");
        assert_eq!(last_error(), "");

        wlab_data_free(d);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(
            wlab_data_from_json(ptr::null(), &mut d),
            WlabStatus::NullPointer
        );
        assert!(last_error().contains("json"));
        let json = fixture("example23");
        assert_eq!(
            wlab_data_from_json(json.as_ptr(), ptr::null_mut()),
            WlabStatus::NullPointer
        );

        let mut x = 0.0;
        assert_eq!(
            wlab_metric_factor(ptr::null(), 1.0, 0.0, &mut x),
            WlabStatus::NullPointer
        );
        let d = load("example23");
        assert_eq!(
            wlab_metric_factor(d, 1.0, 0.0, ptr::null_mut()),
            WlabStatus::NullPointer
        );
        assert_eq!(
            wlab_report_json(d, 1, ptr::null_mut()),
            WlabStatus::NullPointer
        );
        assert_eq!(wlab_data_puncture_count(ptr::null()), 0);
        wlab_data_free(d);
        wlab_data_free(ptr::null_mut());
        wlab_string_free(ptr::null_mut());
    }
}

#[test]
fn parse_errors_carry_a_message() {
    let json = fixture("malformed");
    let mut d = ptr::null_mut();
    let s = unsafe { wlab_data_from_json(json.as_ptr(), &mut d) };
    assert_eq!(s, WlabStatus::ParseError);
    assert!(d.is_null());
    assert!(last_error().contains("field `h`"), "{}", last_error());

    let bad = CString::new(
        "{\"genus\": 1, \"punctures\": [\"inf\"], \"h\": \"1\", \"g1\": \"z\", \"g2\": \"0\"}",
    )
    .unwrap();
    assert_eq!(
        unsafe { wlab_data_from_json(bad.as_ptr(), &mut d) },
        WlabStatus::InvalidData
    );

    let bytes = [0xffu8, 0xfe, 0];
    let s = unsafe { wlab_data_from_json(bytes.as_ptr().cast(), &mut d) };
    assert_eq!(s, WlabStatus::InvalidUtf8);
}

#[test]
fn singular_points_and_components() {
    let d = load("example22");
    unsafe {
        let mut x = 0.0;
        assert_eq!(
            wlab_metric_factor(d, 1.0, 0.0, &mut x),
            WlabStatus::SingularPoint
        );
        assert!(!last_error().is_empty());

        let (mut num, mut den) = (0i64, 0i64);
        assert_eq!(
            wlab_nu_f(d, 2, &mut num, &mut den),
            WlabStatus::ConstantComponent
        );
        assert_eq!(wlab_nu_f(d, 3, &mut num, &mut den), WlabStatus::InvalidData);
        assert_eq!(wlab_nu_f(d, 1, &mut num, &mut den), WlabStatus::Ok);
        assert_eq!((num, den), (3, 1));
        wlab_data_free(d);
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/wlab.h")).unwrap();
    for f in [
        "wlab_data_from_json",
        "wlab_data_free",
        "wlab_data_puncture_count",
        "wlab_metric_factor",
        "wlab_gauss_curvature",
        "wlab_nu_f",
        "wlab_report_json",
        "wlab_string_free",
        "wlab_last_error",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("WLAB_STATUS_OK = 0"));
    assert!(
        header.contains("typedef struct WlabData WlabData") || header.contains("struct WlabData;")
    );
}
