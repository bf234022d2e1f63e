//! C ABI over the qosc numerics.
//!
//! Every function returns a `QoscStatus`; results go through out-pointers.
//! Handles are opaque and owned by the caller until passed to the matching
//! `_free`. On failure `qosc_last_error` describes the cause (per thread).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use qosc::coherent::overlap;
use qosc::fock::{word_operator, Truncation, Word};
use qosc::hermite::{poly_eval, FamilyKind, PolyFamily};
use qosc::quantize::quantize_monomial;
use qosc::{verify, Complex64, DeformationParams, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QoscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    WrongRegime = 3,
    OutOfDomain = 4,
    Pole = 5,
    NonConvergence = 6,
    Truncation = 7,
    Quadrature = 8,
    OutOfSupport = 9,
    Divergent = 10,
    /// The run finished but at least one asserted check failed.
    VerificationFailed = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

impl From<&Error> for QoscStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter(_) => QoscStatus::InvalidParameter,
            Error::Regime { .. } => QoscStatus::WrongRegime,
            Error::Domain(_) => QoscStatus::OutOfDomain,
            Error::Pole { .. } => QoscStatus::Pole,
            Error::NonConvergence { .. } => QoscStatus::NonConvergence,
            Error::Truncation { .. } => QoscStatus::Truncation,
            Error::Quadrature { .. } => QoscStatus::Quadrature,
            Error::Support(_) => QoscStatus::OutOfSupport,
            Error::Divergent(_) => QoscStatus::Divergent,
        }
    }
}

/// Opaque (q, l², λ).
pub struct QoscParams {
    inner: DeformationParams,
}

/// Opaque dense complex matrix, row-major.
pub struct QoscMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(QoscStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QoscStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and converts panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<(), Fail> + UnwindSafe) -> QoscStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            set_error("");
            QoscStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QoscStatus::Panic
        }
    }
}

unsafe fn params<'a>(p: *const QoscParams) -> Result<&'a DeformationParams, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("params"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Boxes `v` into `out`; checks `out` first so nothing is allocated on failure.
unsafe fn write_handle<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

fn matrix(rows: usize, cols: usize, get: impl Fn(usize, usize) -> Complex64) -> QoscMatrix {
    let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| get(i, j)).collect();
    QoscMatrix { rows, cols, data }
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(QoscStatus::InvalidParameter, format!("{what} is not UTF-8")))
}

/// Message for the last failing call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qosc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates and stores (q, l², λ); q must be positive and not 1.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qosc_params_new(q: f64, lsq: f64, lambda: f64, out: *mut *mut QoscParams) -> QoscStatus {
    guard(|| {
        let inner = DeformationParams::new(q, lsq, lambda)?;
        write_handle(out, QoscParams { inner })
    })
}

/// # Safety
/// `p` must be null or a handle from `qosc_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qosc_params_free(p: *mut QoscParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Structure function φ(n) = a†a on |n>.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_phi(p: *const QoscParams, n: usize, out: *mut f64) -> QoscStatus {
    guard(|| {
        let p = params(p)?;
        write(out, p.phi(n), "out")
    })
}

/// Coherent-state overlap <z1|z2>.
///
/// # Safety
/// `p` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_overlap(p: *const QoscParams, z1_re: f64, z1_im: f64, z2_re: f64, z2_im: f64, out_re: *mut f64, out_im: *mut f64) -> QoscStatus {
    guard(|| {
        let p = params(p)?;
        let v = overlap(p, Complex64::new(z1_re, z1_im), Complex64::new(z2_re, z2_im))?;
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// Deformed Hermite values h_0(x) … h_nmax(x) into `values[0..=nmax]`.
/// `family` is one of "pos-sub", "mom-sub", "pos-super", "mom-super".
///
/// # Safety
/// `family` must be a NUL-terminated string; `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qosc_hermite_eval(p: *const QoscParams, family: *const c_char, x: f64, nmax: usize, values: *mut f64, len: usize) -> QoscStatus {
    guard(|| {
        let p = params(p)?;
        let fam = PolyFamily::new(FamilyKind::parse(c_str(family, "family")?)?, *p)?;
        if values.is_null() {
            return Err(null("values"));
        }
        if len <= nmax {
            return Err(Fail(QoscStatus::BufferTooSmall, format!("need {} values, buffer holds {len}", nmax + 1)));
        }
        let seq = poly_eval(&fam, x, nmax);
        ptr::copy_nonoverlapping(seq.values.as_ptr(), values, seq.values.len());
        Ok(())
    })
}

/// Matrix of a word in `a` and `a+` (e.g. "a+ a a") on the first `dim` levels.
///
/// # Safety
/// `word` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_word_matrix(p: *const QoscParams, word: *const c_char, dim: usize, out: *mut *mut QoscMatrix) -> QoscStatus {
    guard(|| {
        let p = params(p)?;
        let w = Word::parse(c_str(word, "word")?)?;
        Truncation::new(dim)?;
        let op = word_operator(p, dim, &w)?;
        write_handle(out, matrix(op.matrix.nrows(), op.matrix.ncols(), |i, j| op.matrix[(i, j)]))
    })
}

/// Anti-Wick quantization of z^mu conj(z)^nu on the first `dim` levels.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_quantize_monomial(p: *const QoscParams, mu: usize, nu: usize, dim: usize, out: *mut *mut QoscMatrix) -> QoscStatus {
    guard(|| {
        let p = params(p)?;
        let op = quantize_monomial(p, mu, nu, Truncation::new(dim)?)?;
        write_handle(out, matrix(op.matrix.nrows(), op.matrix.ncols(), |i, j| op.matrix[(i, j)]))
    })
}

/// # Safety
/// `m` must be a live matrix handle; `rows` and `cols` writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_matrix_shape(m: *const QoscMatrix, rows: *mut usize, cols: *mut usize) -> QoscStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        write(rows, m.rows, "rows")?;
        write(cols, m.cols, "cols")
    })
}

/// # Safety
/// `m` must be a live matrix handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_matrix_get(m: *const QoscMatrix, row: usize, col: usize, re: *mut f64, im: *mut f64) -> QoscStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        if row >= m.rows || col >= m.cols {
            return Err(Fail(QoscStatus::InvalidParameter, format!("index ({row}, {col}) outside {}x{}", m.rows, m.cols)));
        }
        let v = m.data[row * m.cols + col];
        write(re, v.re, "re")?;
        write(im, v.im, "im")
    })
}

/// # Safety
/// `m` must be null or a matrix handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qosc_matrix_free(m: *mut QoscMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Runs the invariant suite at `p` (or on the default grid if `p` is null) and
/// returns the JSON report through `report` (free with `qosc_string_free`).
/// Returns `VerificationFailed` when an asserted check fails; the report is
/// written in that case too.
///
/// # Safety
/// `p` must be null or a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_verify(p: *const QoscParams, dim: usize, report: *mut *mut c_char) -> QoscStatus {
    guard(|| {
        if report.is_null() {
            return Err(null("report"));
        }
        report.write(ptr::null_mut());
        Truncation::new(dim)?;
        let points = match p.as_ref() {
            Some(h) => vec![h.inner],
            None => verify::default_grid(),
        };
        let suite = verify::run(&points, dim);
        let json = CString::new(suite.to_json()).map_err(|_| Fail(QoscStatus::Panic, "report contains NUL".into()))?;
        report.write(json.into_raw());
        if suite.all_pass() {
            Ok(())
        } else {
            Err(Fail(QoscStatus::VerificationFailed, "an asserted check failed; see the report".into()))
        }
    })
}

/// Hopf-structure checks at `dim` (2..=32) with antipode constant `c13`, as JSON.
///
/// # Safety
/// `p` must be a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qosc_hopf_verify(p: *const QoscParams, dim: usize, c13: f64, report: *mut *mut c_char) -> QoscStatus {
    guard(|| {
        let p = params(p)?;
        if report.is_null() {
            return Err(null("report"));
        }
        report.write(ptr::null_mut());
        if !(2..=qosc::hopf::MAX_TENSOR_DIM).contains(&dim) {
            return Err(Fail(QoscStatus::InvalidParameter, format!("dim must lie in 2..={}", qosc::hopf::MAX_TENSOR_DIM)));
        }
        let suite = verify::hopf_axioms(p, dim, c13);
        let json = CString::new(suite.to_json()).map_err(|_| Fail(QoscStatus::Panic, "report contains NUL".into()))?;
        report.write(json.into_raw());
        if suite.all_pass() {
            Ok(())
        } else {
            Err(Fail(QoscStatus::VerificationFailed, "an asserted check failed; see the report".into()))
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qosc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
