//! Exercises the C surface exactly as a foreign caller would.

use std::ffi::{CStr, CString};
use std::ptr;

use qclab_capi::*;

const SPEC: &str = qclab::flip::spec::TWO_PIECE_JSON;

#[test]
fn load_query_free_round_trip() {
    unsafe {
        let json = CString::new(SPEC).unwrap();
        let mut handle: *mut QclabModel = ptr::null_mut();
        assert_eq!(
            qclab_model_load_json(json.as_ptr(), &mut handle),
            QclabStatus::Ok
        );
        assert!(!handle.is_null());
        assert_eq!(qclab_model_piece_count(handle), 2);

        let mut gap = 0.0f64;
        assert_eq!(qclab_wall_gap(handle, 3, &mut gap), QclabStatus::Ok);
        assert!(gap > 0.0);

        let word = CString::new("t0 ; v1: a ; t0^-1 ; v0: b").unwrap();
        let mut tau = -1i64;
        assert_eq!(
            qclab_translation_length(handle, word.as_ptr(), &mut tau),
            QclabStatus::Ok
        );
        assert_eq!(tau, 2);
        let mut morse = -1;
        assert_eq!(
            qclab_is_morse(handle, word.as_ptr(), &mut morse),
            QclabStatus::Ok
        );
        assert_eq!(morse, 1);

        let mut d = -1.0f64;
        let identity = CString::new("").unwrap();
        assert_eq!(
            qclab_orbit_distance(handle, word.as_ptr(), identity.as_ptr(), 0.25, &mut d),
            QclabStatus::Ok
        );
        assert!(d > 0.2 && d < 2.0, "orbit displacement {d}");

        qclab_model_free(handle);
    }
}

#[test]
fn errors_set_messages_and_codes() {
    unsafe {
        let mut handle: *mut QclabModel = ptr::null_mut();
        let bad = CString::new("{\"pieces\": [], \"gluings\": []}").unwrap();
        let status = qclab_model_load_json(bad.as_ptr(), &mut handle);
        assert_eq!(status, QclabStatus::ParseError);
        assert!(handle.is_null());
        let msg = CStr::from_ptr(qclab_last_error_message());
        assert!(!msg.to_bytes().is_empty());

        assert_eq!(
            qclab_model_load_json(ptr::null(), &mut handle),
            QclabStatus::NullArgument
        );

        let json = CString::new(SPEC).unwrap();
        assert_eq!(
            qclab_model_load_json(json.as_ptr(), &mut handle),
            QclabStatus::Ok
        );
        let bad_word = CString::new("q9").unwrap();
        let mut tau = 0i64;
        assert_eq!(
            qclab_translation_length(handle, bad_word.as_ptr(), &mut tau),
            QclabStatus::WordError
        );
        qclab_model_free(handle);
        qclab_model_free(ptr::null_mut());
    }
}

#[test]
fn abc_analysis_json() {
    unsafe {
        let matrix = CString::new("2 1 1 1").unwrap();
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            qclab_abc_analyze_json(matrix.as_ptr(), &mut out),
            QclabStatus::Ok
        );
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        qclab_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["exists_finite_height"], serde_json::json!(true));
        assert_eq!(v["periodic_order"], serde_json::Value::Null);

        let singular = CString::new("2 0 0 2").unwrap();
        let mut out2: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            qclab_abc_analyze_json(singular.as_ptr(), &mut out2),
            QclabStatus::InvalidSpec
        );
        assert!(out2.is_null());
    }
}

#[test]
fn version_is_exposed() {
    let v = unsafe { CStr::from_ptr(qclab_version()) };
    assert!(!v.to_bytes().is_empty());
}
