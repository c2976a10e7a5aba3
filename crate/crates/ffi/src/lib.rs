//! C ABI over the core library: opaque handles, status codes, and a
//! thread-local last-error slot.
//!
//! Conventions:
//! - Every fallible call returns a [`GmStatus`]; outputs come back through
//!   `out` pointers that are written only on `GM_STATUS_OK`.
//! - Strings returned through `out` pointers are NUL-terminated, allocated
//!   by this library, and must be released with [`gm_string_free`].
//! - Handles must be released with their matching `_free` function. Passing
//!   NULL to a `_free` function is a no-op.
//! - [`gm_last_error_message`] describes the most recent failure on the
//!   calling thread; the pointer stays valid until the next failing call on
//!   that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gmoyal::fock::{matrix_to_json, quantize_matrix};
use gmoyal::lang::{format_aa, format_op, format_phase, parse_phase_poly};
use gmoyal::opalg::{ladder_map, quantize};
use gmoyal::phase::{g_star, PhasePoly};
use gmoyal::series::{parse_custom_f, Ordering, Preset};
use gmoyal::verify::{run_all, OrderingSource, OrderingSpec, Suite, VerifyConfig, ALL_SUITES};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownPreset = 4,
    Io = 5,
    InvalidArgument = 6,
    InsufficientOrder = 7,
    Panic = 8,
}

/// Target algebra of `gm_quantize_format`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmRep {
    Op = 0,
    Aa = 1,
}

/// Opaque phase-space polynomial handle.
pub struct GmPoly {
    inner: PhasePoly,
}

/// Opaque ordering-scheme handle. Stores the scheme itself; each operation
/// instantiates it at whatever truncation order that operation needs.
pub struct GmOrdering {
    spec: OrderingSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<(CString, i64)>> = const { RefCell::new(None) };
}

fn set_error(status: GmStatus, message: &str, position: i64) -> GmStatus {
    let message = CString::new(message.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("invalid error message").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some((message, position)));
    status
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |(msg, _)| msg.as_ptr())
    })
}

/// Byte offset attached to the most recent parse failure, or -1.
#[no_mangle]
pub extern "C" fn gm_last_error_position() -> i64 {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(-1, |(_, pos)| *pos))
}

/// # Safety
/// `ptr` must be NULL or a pointer previously returned through an `out`
/// string parameter of this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(CString::from_raw(ptr));
    }
}

/// # Safety
/// `poly` must be NULL or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gm_poly_free(poly: *mut GmPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// # Safety
/// `ordering` must be NULL or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gm_ordering_free(ordering: *mut GmOrdering) {
    if !ordering.is_null() {
        drop(Box::from_raw(ordering));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, GmStatus> {
    if ptr.is_null() {
        return Err(set_error(GmStatus::NullPointer, "NULL string argument", -1));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| set_error(GmStatus::InvalidUtf8, "argument is not valid UTF-8", -1))
}

fn write_string(out: *mut *mut c_char, value: String) -> GmStatus {
    if out.is_null() {
        return set_error(GmStatus::NullPointer, "NULL output pointer", -1);
    }
    let value = CString::new(value.replace('\0', "?")).expect("NUL bytes replaced");
    unsafe { *out = value.into_raw() };
    GmStatus::Ok
}

fn guarded(body: impl FnOnce() -> GmStatus) -> GmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => set_error(GmStatus::Panic, "internal panic", -1),
    }
}

/// Parse an expression in the CLI grammar into a polynomial handle.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_poly_parse(src: *const c_char, out: *mut *mut GmPoly) -> GmStatus {
    guarded(|| {
        let text = match read_str(src) {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out.is_null() {
            return set_error(GmStatus::NullPointer, "NULL output pointer", -1);
        }
        match parse_phase_poly(text) {
            Ok(poly) => {
                *out = Box::into_raw(Box::new(GmPoly { inner: poly }));
                GmStatus::Ok
            }
            Err(err) => set_error(
                GmStatus::ParseError,
                &err.to_string(),
                err.position() as i64,
            ),
        }
    })
}

/// Canonical rendering of a polynomial; re-parses to the same value.
///
/// # Safety
/// `poly` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_poly_format(poly: *const GmPoly, out: *mut *mut c_char) -> GmStatus {
    guarded(|| {
        let Some(poly) = poly.as_ref() else {
            return set_error(GmStatus::NullPointer, "NULL polynomial handle", -1);
        };
        write_string(out, format_phase(&poly.inner))
    })
}

/// Ordering handle from a preset name
/// (`weyl|standard|antistandard|symmetric|born_jordan`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_ordering_preset(
    name: *const c_char,
    out: *mut *mut GmOrdering,
) -> GmStatus {
    guarded(|| {
        let name = match read_str(name) {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out.is_null() {
            return set_error(GmStatus::NullPointer, "NULL output pointer", -1);
        }
        match Preset::from_name(name) {
            Ok(preset) => {
                *out = Box::into_raw(Box::new(GmOrdering {
                    spec: OrderingSpec::preset(preset),
                }));
                GmStatus::Ok
            }
            Err(err) => set_error(GmStatus::UnknownPreset, &err.to_string(), -1),
        }
    })
}

/// Ordering handle from a custom coefficient file
/// (one `re_num/re_den,im_num/im_den` line per coefficient, leading
/// coefficient 1).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_ordering_custom_file(
    path: *const c_char,
    out: *mut *mut GmOrdering,
) -> GmStatus {
    guarded(|| {
        let path = match read_str(path) {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out.is_null() {
            return set_error(GmStatus::NullPointer, "NULL output pointer", -1);
        }
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(err) => return set_error(GmStatus::Io, &format!("{path}: {err}"), -1),
        };
        match parse_custom_f(&text) {
            Ok(coeffs) => {
                *out = Box::into_raw(Box::new(GmOrdering {
                    spec: OrderingSpec::custom(path.to_owned(), coeffs),
                }));
                GmStatus::Ok
            }
            Err(err) => set_error(GmStatus::ParseError, &format!("{path}: {err}"), -1),
        }
    })
}

fn instantiate(spec: &OrderingSpec, order: usize) -> Ordering {
    match &spec.source {
        OrderingSource::Preset(p) => Ordering::preset(*p, order),
        OrderingSource::Custom(coeffs) => Ordering::custom(spec.label.clone(), coeffs, order)
            .expect("coefficients validated when the handle was created"),
    }
}

/// Star product of two polynomials under an ordering.
///
/// # Safety
/// `a`, `b`, `ordering` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_star(
    a: *const GmPoly,
    b: *const GmPoly,
    ordering: *const GmOrdering,
    out: *mut *mut GmPoly,
) -> GmStatus {
    guarded(|| {
        let (Some(a), Some(b), Some(ordering)) = (a.as_ref(), b.as_ref(), ordering.as_ref()) else {
            return set_error(GmStatus::NullPointer, "NULL handle argument", -1);
        };
        if out.is_null() {
            return set_error(GmStatus::NullPointer, "NULL output pointer", -1);
        }
        let order = (a.inner.total_degree() + b.inner.total_degree()) as usize;
        let ord = instantiate(&ordering.spec, order);
        match g_star(&a.inner, &b.inner, &ord) {
            Ok(product) => {
                *out = Box::into_raw(Box::new(GmPoly { inner: product }));
                GmStatus::Ok
            }
            Err(err) => set_error(GmStatus::InsufficientOrder, &err.to_string(), -1),
        }
    })
}

/// Operator image of a polynomial, rendered canonically in the chosen
/// representation.
///
/// # Safety
/// `poly` and `ordering` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_quantize_format(
    poly: *const GmPoly,
    ordering: *const GmOrdering,
    rep: GmRep,
    out: *mut *mut c_char,
) -> GmStatus {
    guarded(|| {
        let (Some(poly), Some(ordering)) = (poly.as_ref(), ordering.as_ref()) else {
            return set_error(GmStatus::NullPointer, "NULL handle argument", -1);
        };
        let ord = instantiate(&ordering.spec, poly.inner.max_mixed_degree() as usize);
        match quantize(&poly.inner, &ord) {
            Ok(op) => {
                let text = match rep {
                    GmRep::Op => format_op(&op),
                    GmRep::Aa => format_aa(&ladder_map(&op)),
                };
                write_string(out, text)
            }
            Err(err) => set_error(GmStatus::InsufficientOrder, &err.to_string(), -1),
        }
    })
}

/// Truncated matrix image as JSON. With `has_hbar`, entries are evaluated
/// numerically at `hbar` and rendered as `re,im` pairs.
///
/// # Safety
/// `poly` and `ordering` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_matrix_json(
    poly: *const GmPoly,
    ordering: *const GmOrdering,
    dim: usize,
    has_hbar: bool,
    hbar: f64,
    out: *mut *mut c_char,
) -> GmStatus {
    guarded(|| {
        let (Some(poly), Some(ordering)) = (poly.as_ref(), ordering.as_ref()) else {
            return set_error(GmStatus::NullPointer, "NULL handle argument", -1);
        };
        if dim < 1 {
            return set_error(GmStatus::InvalidArgument, "dim must be at least 1", -1);
        }
        let ord = instantiate(&ordering.spec, poly.inner.max_mixed_degree() as usize);
        match quantize_matrix(&poly.inner, &ord, dim) {
            Ok(matrix) => write_string(
                out,
                matrix_to_json(&matrix, if has_hbar { Some(hbar) } else { None }),
            ),
            Err(err) => set_error(GmStatus::InsufficientOrder, &err.to_string(), -1),
        }
    })
}

/// Run property suites; `suites_csv`/`orderings_csv` may be NULL for "all".
/// Writes the JSON-lines report stream and sets `out_all_passed`.
///
/// # Safety
/// CSV arguments must be NULL or NUL-terminated strings; `out_all_passed`
/// and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gm_verify_jsonl(
    suites_csv: *const c_char,
    orderings_csv: *const c_char,
    max_degree: u32,
    trials: u32,
    dim: usize,
    seed: u64,
    out_all_passed: *mut bool,
    out: *mut *mut c_char,
) -> GmStatus {
    guarded(|| {
        if out_all_passed.is_null() {
            return set_error(GmStatus::NullPointer, "NULL output pointer", -1);
        }
        if max_degree < 1 || trials < 1 || dim < 2 {
            return set_error(
                GmStatus::InvalidArgument,
                "need max_degree >= 1, trials >= 1, dim >= 2",
                -1,
            );
        }
        let suites: Vec<Suite> = if suites_csv.is_null() {
            ALL_SUITES.to_vec()
        } else {
            let text = match read_str(suites_csv) {
                Ok(t) => t,
                Err(status) => return status,
            };
            let mut suites = Vec::new();
            for name in text.split(',').map(str::trim) {
                match Suite::from_name(name) {
                    Some(s) => suites.push(s),
                    None => {
                        return set_error(
                            GmStatus::InvalidArgument,
                            &format!("unknown suite `{name}`"),
                            -1,
                        )
                    }
                }
            }
            suites
        };
        let orderings: Vec<OrderingSpec> = if orderings_csv.is_null() {
            OrderingSpec::all_presets()
        } else {
            let text = match read_str(orderings_csv) {
                Ok(t) => t,
                Err(status) => return status,
            };
            let mut specs = Vec::new();
            for name in text.split(',').map(str::trim) {
                match Preset::from_name(name) {
                    Ok(p) => specs.push(OrderingSpec::preset(p)),
                    Err(err) => return set_error(GmStatus::UnknownPreset, &err.to_string(), -1),
                }
            }
            specs
        };
        let cfg = VerifyConfig {
            max_degree,
            trials,
            dim,
            seed,
        };
        let reports = run_all(&suites, &orderings, &cfg);
        let all_passed = reports.iter().all(|r| r.passed());
        let mut stream = String::new();
        for report in &reports {
            stream.push_str(
                &serde_json::to_string(report).expect("report serialization cannot fail"),
            );
            stream.push('\n');
        }
        *out_all_passed = all_passed;
        write_string(out, stream)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    unsafe fn parse(text: &str) -> *mut GmPoly {
        let src = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(gm_poly_parse(src.as_ptr(), &mut out), GmStatus::Ok);
        out
    }

    unsafe fn preset(name: &str) -> *mut GmOrdering {
        let name = CString::new(name).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(gm_ordering_preset(name.as_ptr(), &mut out), GmStatus::Ok);
        out
    }

    unsafe fn take_string(ptr: *mut c_char) -> String {
        let s = CStr::from_ptr(ptr).to_str().unwrap().to_owned();
        gm_string_free(ptr);
        s
    }

    #[test]
    fn parse_format_star_roundtrip() {
        unsafe {
            let a = parse("x");
            let b = parse("p");
            let weyl = preset("weyl");
            let mut product = ptr::null_mut();
            assert_eq!(gm_star(a, b, weyl, &mut product), GmStatus::Ok);
            let mut text = ptr::null_mut();
            assert_eq!(gm_poly_format(product, &mut text), GmStatus::Ok);
            assert_eq!(take_string(text), "p*x + (1/2)*i*hbar");
            gm_poly_free(a);
            gm_poly_free(b);
            gm_poly_free(product);
            gm_ordering_free(weyl);
        }
    }

    #[test]
    fn quantize_both_representations() {
        unsafe {
            let poly = parse("p*x");
            let weyl = preset("weyl");
            let mut text = ptr::null_mut();
            assert_eq!(
                gm_quantize_format(poly, weyl, GmRep::Op, &mut text),
                GmStatus::Ok
            );
            assert_eq!(take_string(text), "P*X + (1/2)*i*hbar");
            let mut text = ptr::null_mut();
            assert_eq!(
                gm_quantize_format(poly, weyl, GmRep::Aa, &mut text),
                GmStatus::Ok
            );
            assert_eq!(take_string(text), "-i*A*Ad*hbar + (1/2)*i*hbar");
            gm_poly_free(poly);
            gm_ordering_free(weyl);
        }
    }

    #[test]
    fn matrix_json_through_ffi() {
        unsafe {
            let poly = parse("p*x");
            let ast = preset("antistandard");
            let mut text = ptr::null_mut();
            assert_eq!(
                gm_matrix_json(poly, ast, 3, false, 0.0, &mut text),
                GmStatus::Ok
            );
            let json = take_string(text);
            assert!(json.contains("\"dim\":3"), "{json}");
            assert!(json.contains("-2i*hbar"), "{json}");
            gm_poly_free(poly);
            gm_ordering_free(ast);
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        unsafe {
            let src = CString::new("p^-1").unwrap();
            let mut out = ptr::null_mut();
            assert_eq!(gm_poly_parse(src.as_ptr(), &mut out), GmStatus::ParseError);
            assert_eq!(gm_last_error_position(), 2);
            let msg = CStr::from_ptr(gm_last_error_message()).to_str().unwrap();
            assert!(msg.contains("negative exponent"), "{msg}");
        }
    }

    #[test]
    fn null_arguments_rejected() {
        unsafe {
            let mut out = ptr::null_mut();
            assert_eq!(gm_poly_parse(ptr::null(), &mut out), GmStatus::NullPointer);
            let poly = parse("x");
            assert_eq!(
                gm_poly_format(ptr::null(), &mut ptr::null_mut()),
                GmStatus::NullPointer
            );
            gm_poly_free(poly);
            gm_poly_free(ptr::null_mut());
            gm_ordering_free(ptr::null_mut());
            gm_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn unknown_preset_rejected() {
        unsafe {
            let name = CString::new("wick").unwrap();
            let mut out = ptr::null_mut();
            assert_eq!(
                gm_ordering_preset(name.as_ptr(), &mut out),
                GmStatus::UnknownPreset
            );
        }
    }

    #[test]
    fn invalid_arguments_rejected() {
        unsafe {
            let poly = parse("x");
            let weyl = preset("weyl");
            let mut text = ptr::null_mut();
            assert_eq!(
                gm_matrix_json(poly, weyl, 0, false, 0.0, &mut text),
                GmStatus::InvalidArgument
            );
            let mut all_passed = false;
            assert_eq!(
                gm_verify_jsonl(
                    ptr::null(),
                    ptr::null(),
                    0,
                    1,
                    4,
                    1,
                    &mut all_passed,
                    &mut text
                ),
                GmStatus::InvalidArgument
            );
            let suites = CString::new("nope").unwrap();
            assert_eq!(
                gm_verify_jsonl(
                    suites.as_ptr(),
                    ptr::null(),
                    2,
                    1,
                    4,
                    1,
                    &mut all_passed,
                    &mut text
                ),
                GmStatus::InvalidArgument
            );
            gm_poly_free(poly);
            gm_ordering_free(weyl);
        }
    }

    #[test]
    fn verify_through_ffi() {
        unsafe {
            let suites = CString::new("g-consistency,adjoint-reality").unwrap();
            let orderings = CString::new("weyl,standard").unwrap();
            let mut all_passed = false;
            let mut out = ptr::null_mut();
            assert_eq!(
                gm_verify_jsonl(
                    suites.as_ptr(),
                    orderings.as_ptr(),
                    3,
                    5,
                    6,
                    9,
                    &mut all_passed,
                    &mut out,
                ),
                GmStatus::Ok
            );
            let stream = take_string(out);
            assert!(all_passed, "{stream}");
            assert_eq!(stream.lines().count(), 4);
            assert!(stream.contains("\"counterexample\":\"p*x\""), "{stream}");
        }
    }
}
