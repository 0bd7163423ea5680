//! C ABI for the qclab library.
//!
//! Opaque handles own the parsed model; every call returns a status code and
//! writes results through out-parameters. String results are heap-allocated
//! and released with `qclab_string_free`. The last error message per thread
//! is available through `qclab_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use qclab::flip::{load_spec, Model, PointCoord};
use qclab::words;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QclabStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidSpec = 4,
    WordError = 5,
    BudgetExceeded = 6,
    InternalError = 7,
}

/// Opaque model handle.
pub struct QclabModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(err: &qclab::Error) -> QclabStatus {
    use qclab::Error::*;
    match err {
        Parse(_) => QclabStatus::ParseError,
        BettiTooSmall { .. }
        | SpineDisconnected { .. }
        | BadBoundaryCycle { .. }
        | UnmatchedCycle { .. }
        | FlipIncompatible { .. }
        | DegenerateGluing(_)
        | NotUnimodular(_) => QclabStatus::InvalidSpec,
        MalformedWord(_) | NotALoop { .. } | IdentityWord => QclabStatus::WordError,
        BudgetExceeded(_) => QclabStatus::BudgetExceeded,
        _ => QclabStatus::InternalError,
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, QclabStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(QclabStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        QclabStatus::InvalidUtf8
    })
}

/// Library version string; static storage, do not free.
#[no_mangle]
pub extern "C" fn qclab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent error on this thread; borrowed, do not free.
#[no_mangle]
pub extern "C" fn qclab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses and validates a manifold spec; on success writes a handle that
/// must be released with `qclab_model_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qclab_model_load_json(
    json: *const c_char,
    out: *mut *mut QclabModel,
) -> QclabStatus {
    if out.is_null() {
        set_error("null output pointer");
        return QclabStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let text = match cstr_arg(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match load_spec(text) {
        Ok(spec) => {
            let handle = Box::new(QclabModel {
                model: Model::new(spec),
            });
            *out = Box::into_raw(handle);
            QclabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must come from `qclab_model_load_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qclab_model_free(model: *mut QclabModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of pieces in the model, or -1 on a null handle.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qclab_model_piece_count(model: *const QclabModel) -> c_int {
    if model.is_null() {
        return -1;
    }
    (*model).model.spec.pieces.len() as c_int
}

/// Minimum positive wall separation within the exploration radius.
///
/// # Safety
/// `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qclab_wall_gap(
    model: *const QclabModel,
    radius: c_int,
    out: *mut f64,
) -> QclabStatus {
    if model.is_null() || out.is_null() {
        set_error("null argument");
        return QclabStatus::NullArgument;
    }
    match (*model).model.min_wall_separation(radius.max(1) as usize) {
        Ok(rep) => {
            *out = qclab::num::rat_to_f64(&rep.gap);
            QclabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Dual-tree translation length of a word literal
/// (e.g. "t0 ; v1: a ; t0^-1 ; v0: b").
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qclab_translation_length(
    model: *const QclabModel,
    word: *const c_char,
    out: *mut i64,
) -> QclabStatus {
    if model.is_null() || out.is_null() {
        set_error("null argument");
        return QclabStatus::NullArgument;
    }
    let text = match cstr_arg(word) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let m = &(*model).model;
    let parsed = match words::parse_word(m, text) {
        Ok(w) => w,
        Err(e) => {
            set_error(&e.to_string());
            return status_of(&e);
        }
    };
    match m.translation_length(&parsed) {
        Ok(tau) => {
            *out = tau as i64;
            QclabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Morse test of a nontrivial word: writes 1 or 0.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qclab_is_morse(
    model: *const QclabModel,
    word: *const c_char,
    out: *mut c_int,
) -> QclabStatus {
    if model.is_null() || out.is_null() {
        set_error("null argument");
        return QclabStatus::NullArgument;
    }
    let text = match cstr_arg(word) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let m = &(*model).model;
    let result = words::parse_word(m, text).and_then(|w| m.is_morse(&w));
    match result {
        Ok(v) => {
            *out = v as c_int;
            QclabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Discretized distance between the deck translates g . x0 and h . x0 of
/// the root basepoint, for loop-word literals g and h.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qclab_orbit_distance(
    model: *const QclabModel,
    word_g: *const c_char,
    word_h: *const c_char,
    resolution: f64,
    out: *mut f64,
) -> QclabStatus {
    if model.is_null() || out.is_null() {
        set_error("null argument");
        return QclabStatus::NullArgument;
    }
    let (tg, th) = match (cstr_arg(word_g), cstr_arg(word_h)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let m = &(*model).model;
    let run = || -> qclab::Result<f64> {
        let g = words::parse_word(m, tg)?;
        let h = words::parse_word(m, th)?;
        let x = PointCoord::root();
        let gx = m.act_on_point(&g, &x)?;
        let hx = m.act_on_point(&h, &x)?;
        qclab::oracle::approx_distance(m, &gx, &hx, resolution)
    };
    match run() {
        Ok(d) => {
            *out = d;
            QclabStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Full analysis of Z^k x| Z for a row-major matrix literal like "2 1 1 1";
/// writes a JSON report string to be released with `qclab_string_free`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qclab_abc_analyze_json(
    matrix: *const c_char,
    out: *mut *mut c_char,
) -> QclabStatus {
    if out.is_null() {
        set_error("null output pointer");
        return QclabStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let text = match cstr_arg(matrix) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let run = || -> qclab::Result<String> {
        let phi = qclab::abc::parse_matrix(text)?;
        let group = qclab::abc::AbcGroup::new(phi.clone())?;
        let order = qclab::abc::periodic_order(&phi)?;
        let gens = vec![qclab::abc::AbcElement::new(1, vec![0; phi.k])];
        let classification = qclab::abc::classify_subgroup(&group, &gens)?;
        let sq = qclab::abc::sq_classification(&group, &gens)?;
        Ok(serde_json::json!({
            "k": phi.k,
            "periodic_order": order,
            "periodic_order_cyclotomic": qclab::abc::periodic_order_cyclotomic(&phi),
            "exists_finite_height": order.is_none(),
            "classification": classification,
            "sq_classification": sq,
        })
        .to_string())
    };
    match run() {
        Ok(json) => match CString::new(json) {
            Ok(s) => {
                *out = s.into_raw();
                QclabStatus::Ok
            }
            Err(_) => {
                set_error("report contained an interior NUL");
                QclabStatus::InternalError
            }
        },
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
