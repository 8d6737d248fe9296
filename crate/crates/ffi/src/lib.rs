//! C interface to `densops`.
//!
//! Operators live behind the opaque [`DensopsOperator`] handle. Every
//! function returns a [`DensopsStatus`]; results come back through out
//! pointers, and on failure [`densops_last_error_message`] describes the
//! error on the calling thread. Rationals and expressions cross the
//! boundary as NUL-terminated UTF-8 strings (`"2/3"`, `"x1*d1 + w"`).
//! Strings returned by the library must be released with
//! [`densops_string_free`], handles with [`densops_operator_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use densops::algebra::{parse_rational, Rational};
use densops::density::DensityOperator;
use densops::io::{parse_operator, OperatorJson};
use densops::pencil::{canonical_second_order_lift, first_order_pencil};
use densops::projective::{dlo_pencil, dlo_table};
use densops::Error;

/// Outcome of a call. Values other than `Ok` mirror the error codes of the
/// command-line driver.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DensopsStatus {
    Ok = 0,
    EDim = 1,
    ESingularWeight = 2,
    EExcludedParam = 3,
    EOrder = 4,
    EParse = 5,
    ETable = 6,
    EDomain = 7,
    EIo = 8,
    ENullPointer = 9,
    EInternal = 10,
}

impl DensopsStatus {
    fn of(e: &Error) -> Self {
        match e.code() {
            "E_DIM" => DensopsStatus::EDim,
            "E_SINGULAR_WEIGHT" => DensopsStatus::ESingularWeight,
            "E_EXCLUDED_PARAM" => DensopsStatus::EExcludedParam,
            "E_ORDER" => DensopsStatus::EOrder,
            "E_PARSE" => DensopsStatus::EParse,
            "E_TABLE" => DensopsStatus::ETable,
            "E_DOMAIN" => DensopsStatus::EDomain,
            "E_IO" => DensopsStatus::EIo,
            _ => DensopsStatus::EInternal,
        }
    }
}

/// Opaque operator handle.
pub struct DensopsOperator(DensityOperator);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Outcome<()>) -> DensopsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DensopsStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            DensopsStatus::of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer passed as {what}"));
            DensopsStatus::ENullPointer
        }
        Err(_) => {
            set_last_error("internal error");
            DensopsStatus::EInternal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::Parse { line: 1, column: 1, message: format!("{what} is not valid UTF-8") }))
}

unsafe fn rational(p: *const c_char, what: &'static str) -> Outcome<Rational> {
    Ok(parse_rational(text(p, what)?)?)
}

unsafe fn handle<'a>(p: *const DensopsOperator, what: &'static str) -> Outcome<&'a DensityOperator> {
    p.as_ref().map(|h| &h.0).ok_or(Failure::Null(what))
}

unsafe fn emit(out: *mut *mut DensopsOperator, op: DensityOperator) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(DensopsOperator(op)));
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = CString::new(s).map_err(|_| Failure::Lib(Error::Io("interior NUL in output".into())))?.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn densops_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Stable name of a status, such as `"E_PARSE"`.
#[no_mangle]
pub extern "C" fn densops_status_name(status: DensopsStatus) -> *const c_char {
    let s: &'static CStr = match status {
        DensopsStatus::Ok => c"OK",
        DensopsStatus::EDim => c"E_DIM",
        DensopsStatus::ESingularWeight => c"E_SINGULAR_WEIGHT",
        DensopsStatus::EExcludedParam => c"E_EXCLUDED_PARAM",
        DensopsStatus::EOrder => c"E_ORDER",
        DensopsStatus::EParse => c"E_PARSE",
        DensopsStatus::ETable => c"E_TABLE",
        DensopsStatus::EDomain => c"E_DOMAIN",
        DensopsStatus::EIo => c"E_IO",
        DensopsStatus::ENullPointer => c"E_NULL_POINTER",
        DensopsStatus::EInternal => c"E_INTERNAL",
    };
    s.as_ptr()
}

/// Parses an operator expression over `x1..xd`, `d1..dd`, `w`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_parse(
    src: *const c_char,
    dim: usize,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| emit(out, parse_operator(text(src, "src")?, dim)?))
}

/// Reads an operator from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_from_json(
    json: *const c_char,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| {
        let doc: OperatorJson = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        emit(out, doc.to_operator()?)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `op` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_free(op: *mut DensopsOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Dimension of the underlying space, 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_dim(op: *const DensopsOperator) -> usize {
    op.as_ref().map_or(0, |h| h.0.dim())
}

/// Canonical JSON document of `op`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_to_json(op: *const DensopsOperator, out: *mut *mut c_char) -> DensopsStatus {
    guard(|| {
        let doc = OperatorJson::from_operator(handle(op, "op")?);
        emit_string(out, serde_json::to_string(&doc).map_err(Error::from)?)
    })
}

/// Expression text of `op`, readable by [`densops_operator_parse`].
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_to_string(
    op: *const DensopsOperator,
    out: *mut *mut c_char,
) -> DensopsStatus {
    guard(|| emit_string(out, handle(op, "op")?.to_string()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn densops_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `a o b`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_compose(
    a: *const DensopsOperator,
    b: *const DensopsOperator,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| emit(out, handle(a, "a")?.compose(handle(b, "b")?)?))
}

/// Canonical adjoint.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_adjoint(
    a: *const DensopsOperator,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| emit(out, handle(a, "a")?.adjoint()))
}

/// Substitutes the rational `lambda` for `w`.
///
/// # Safety
/// `a` must be a live handle, `lambda` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn densops_operator_restrict(
    a: *const DensopsOperator,
    lambda: *const c_char,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| emit(out, handle(a, "a")?.restrict(&rational(lambda, "lambda")?)))
}

/// Canonical self-adjoint lifting of a second-order operator.
///
/// # Safety
/// As for [`densops_operator_restrict`].
#[no_mangle]
pub unsafe extern "C" fn densops_lift_canonical2(
    a: *const DensopsOperator,
    lambda: *const c_char,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| emit(out, canonical_second_order_lift(handle(a, "a")?, &rational(lambda, "lambda")?)?))
}

/// First-order pencil lifting at the point `[p:q]`.
///
/// # Safety
/// As for [`densops_operator_restrict`], with `p` and `q` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn densops_lift_first_order(
    a: *const DensopsOperator,
    lambda: *const c_char,
    p: *const c_char,
    q: *const c_char,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| {
        let lifted =
            first_order_pencil(handle(a, "a")?, &rational(lambda, "lambda")?, &rational(p, "p")?, &rational(q, "q")?)?;
        emit(out, lifted)
    })
}

/// Projectively equivariant pencil lifting.
///
/// # Safety
/// As for [`densops_operator_restrict`].
#[no_mangle]
pub unsafe extern "C" fn densops_lift_dlo(
    a: *const DensopsOperator,
    lambda: *const c_char,
    out: *mut *mut DensopsOperator,
) -> DensopsStatus {
    guard(|| {
        let op = handle(a, "a")?;
        let table = dlo_table(op.dim(), op.spatial_order().unwrap_or(0).max(1))?;
        emit(out, dlo_pencil(op, &rational(lambda, "lambda")?, &table)?)
    })
}
