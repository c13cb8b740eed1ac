//! C ABI over the `twisted_endoscopy` library.
//!
//! Conventions:
//! - Every fallible function returns a [`TeStatus`] and writes results
//!   through out-pointers. On failure, [`te_last_error`] describes the error
//!   for the calling thread.
//! - Objects cross the boundary as opaque handles ([`TeForm`],
//!   [`TeConfig`]) released by their `_free` function.
//! - Strings returned to the caller are NUL-terminated UTF-8 owned by the
//!   caller and released with [`te_string_free`].
//! - Exact rationals are passed as strings `"num/den"`; structured values as
//!   the JSON literal formats of the library.
//! - Panics never unwind across the boundary; they surface as
//!   [`TeStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::Cursor;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twisted_endoscopy::arith::{parse_rational, Prime};
use twisted_endoscopy::endoscopy::gs_constancy;
use twisted_endoscopy::error::Error;
use twisted_endoscopy::formats::{self, At};
use twisted_endoscopy::gsnorm::{random_config, GsConfig};
use twisted_endoscopy::localfield::{hilbert_qp, square_class};
use twisted_endoscopy::qform::QuadForm;
use twisted_endoscopy::weil::weil_index;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeStatus {
    Ok = 0,
    /// A literal or argument string is malformed.
    Parse = 1,
    /// Well-formed input violating a mathematical precondition.
    Invalid = 2,
    /// A brute-force oracle did not stabilize.
    Inconclusive = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// A string argument was not valid UTF-8.
    Utf8 = 5,
    /// A random search exhausted its retry budget.
    RetryExhausted = 6,
    /// The library panicked; this is a bug.
    Panic = 7,
}

/// Opaque quadratic form.
pub struct TeForm(QuadForm);

/// Opaque orthogonal or symplectic configuration `(V, q; X, Y)`.
pub struct TeConfig(GsConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> TeStatus {
    match e {
        Error::Parse { .. } => TeStatus::Parse,
        Error::Inconclusive(_) | Error::Oracle(_) => TeStatus::Inconclusive,
        Error::RetryExhausted { .. } => TeStatus::RetryExhausted,
        _ => TeStatus::Invalid,
    }
}

struct Fail(TeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Fail>;

/// Runs `f`, recording any error or panic for [`te_last_error`].
fn guard(f: impl FnOnce() -> FfiResult<()>) -> TeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TeStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            TeStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> FfiResult<&'a str> {
    if s.is_null() {
        return Err(Fail(TeStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(TeStatus::Utf8, format!("{name} is not UTF-8")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| Fail(TeStatus::NullPointer, format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Fail(TeStatus::NullPointer, format!("{name} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs replaced").into_raw()
}

fn parse_literal<T>(text: &str, f: impl FnOnce(At<'_>) -> twisted_endoscopy::Result<T>) -> FfiResult<T> {
    let v = formats::parse_json(text)?;
    Ok(f(At::root(&v))?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn te_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn te_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Hilbert symbol `(a, b)_p` of two rationals given as `"num/den"`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_hilbert_qp(a: *const c_char, b: *const c_char, p: u64, out: *mut i8) -> TeStatus {
    guard(|| {
        let x = parse_rational(read_str(a, "a")?)?;
        let y = parse_rational(read_str(b, "b")?)?;
        *out_ptr(out, "out")? = hilbert_qp(&x, &y, Prime::new(p)?)?;
        Ok(())
    })
}

/// Canonical square-class representative of a nonzero rational, as a new
/// string.
///
/// # Safety
/// `a` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_square_class(a: *const c_char, p: u64, out: *mut *mut c_char) -> TeStatus {
    guard(|| {
        let x = parse_rational(read_str(a, "a")?)?;
        let c = square_class(&x, Prime::new(p)?)?;
        *out_ptr(out, "out")? = owned_string(c.to_string());
        Ok(())
    })
}

/// Parses a form literal `{"p", "diag" | "gram", "label"?}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_form_parse(json: *const c_char, out: *mut *mut TeForm) -> TeStatus {
    guard(|| {
        let q = parse_literal(read_str(json, "json")?, formats::parse_form)?;
        *out_ptr(out, "out")? = Box::into_raw(Box::new(TeForm(q)));
        Ok(())
    })
}

/// # Safety
/// `form` must be null or a handle from [`te_form_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_form_free(form: *mut TeForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Dimension of a form; 0 for a null handle.
///
/// # Safety
/// `form` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn te_form_dim(form: *const TeForm) -> usize {
    form.as_ref().map_or(0, |f| f.0.dim())
}

/// Invariants (dimension, determinant, discriminant, Hasse invariant, Witt
/// index, isotropy) as a JSON document.
///
/// # Safety
/// `form` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_form_invariants(form: *const TeForm, out: *mut *mut c_char) -> TeStatus {
    guard(|| {
        let q = &handle(form, "form")?.0;
        *out_ptr(out, "out")? = owned_string(formats::invariants_json(q).to_string());
        Ok(())
    })
}

/// Weil index `γ_ψ(q) = ζ₈^k`; writes `k ∈ [0, 8)`.
///
/// # Safety
/// `form` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_form_weil_index(form: *const TeForm, out: *mut u8) -> TeStatus {
    guard(|| {
        let q = &handle(form, "form")?.0;
        *out_ptr(out, "out")? = weil_index(q).exponent();
        Ok(())
    })
}

/// Whether two forms over the same ℚ_p are isometric.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_form_equivalent(a: *const TeForm, b: *const TeForm, out: *mut bool) -> TeStatus {
    guard(|| {
        let (x, y) = (&handle(a, "a")?.0, &handle(b, "b")?.0);
        *out_ptr(out, "out")? = x.equivalent(y)?;
        Ok(())
    })
}

/// Parses a configuration literal `{"ambient", "X", "Y"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_config_parse(json: *const c_char, out: *mut *mut TeConfig) -> TeStatus {
    guard(|| {
        let c = parse_literal(read_str(json, "json")?, formats::parse_config)?;
        *out_ptr(out, "out")? = Box::into_raw(Box::new(TeConfig(c)));
        Ok(())
    })
}

/// Seeded random configuration over an ambient literal
/// `{"qV": form, "epsilon": ±1}`.
///
/// # Safety
/// `ambient_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_config_random(ambient_json: *const c_char, seed: u64, out: *mut *mut TeConfig) -> TeStatus {
    guard(|| {
        let amb = parse_literal(read_str(ambient_json, "ambient_json")?, formats::parse_ambient)?;
        let c = random_config(&amb, seed)?;
        *out_ptr(out, "out")? = Box::into_raw(Box::new(TeConfig(c)));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn te_config_free(config: *mut TeConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// The configuration as a literal.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_config_to_json(config: *const TeConfig, out: *mut *mut c_char) -> TeStatus {
    guard(|| {
        let c = &handle(config, "config")?.0;
        *out_ptr(out, "out")? = owned_string(formats::config_json(c).to_string());
        Ok(())
    })
}

/// Both sides of the constancy check on a configuration of rank `n`.
/// `lhs` receives `-1` when the configuration is off the closure variety.
///
/// # Safety
/// `config` must be a live handle; all out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_gs_constancy(
    config: *const TeConfig,
    n: usize,
    lhs: *mut i32,
    rhs: *mut u8,
    pass: *mut bool,
) -> TeStatus {
    guard(|| {
        let c = &handle(config, "config")?.0;
        let (lhs, rhs, pass) = (out_ptr(lhs, "lhs")?, out_ptr(rhs, "rhs")?, out_ptr(pass, "pass")?);
        let o = gs_constancy(c, n)?;
        *lhs = o.lhs.map_or(-1, |z| z.exponent() as i32);
        *rhs = o.rhs.exponent();
        *pass = o.pass;
        Ok(())
    })
}

/// Runs one command line of the `twendo` tool. `argv` holds `argc` strings
/// without the program name; `stdin_text` may be null. Returns the exit
/// status (0 pass, 1 check failure, 2 usage, 3 inconclusive) or `-1` if the
/// arguments themselves are unusable. Output documents are written to
/// `out_stdout` and `out_stderr` when those are non-null.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn te_cli_run(
    argc: usize,
    argv: *const *const c_char,
    stdin_text: *const c_char,
    out_stdout: *mut *mut c_char,
    out_stderr: *mut *mut c_char,
) -> i32 {
    let mut code = -1;
    let status = guard(|| {
        let mut args = vec!["twendo".to_string()];
        if argc > 0 {
            if argv.is_null() {
                return Err(Fail(TeStatus::NullPointer, "argv is null".into()));
            }
            for i in 0..argc {
                args.push(read_str(*argv.add(i), "argv element")?.to_string());
            }
        }
        let input = if stdin_text.is_null() { "" } else { read_str(stdin_text, "stdin_text")? };
        let out = twisted_endoscopy::cli::run(args, &mut Cursor::new(input.as_bytes().to_vec()), None);
        if let Some(p) = out_stdout.as_mut() {
            *p = owned_string(out.stdout);
        }
        if let Some(p) = out_stderr.as_mut() {
            *p = owned_string(out.stderr);
        }
        code = out.code;
        Ok(())
    });
    if status == TeStatus::Ok {
        code
    } else {
        -1
    }
}
