//! C interface to `gcrss`.
//!
//! Every fallible call returns a status code (`GCRSS_OK` on success) and
//! writes its results through out-pointers. Matrices and selection results are
//! opaque handles released with their `_free` function. The message for the
//! last failure on the calling thread is available from
//! `gcrss_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gcrss::poly::maxroot;
use gcrss::{
    expected_poly, select_gcrss, GcrssError, GcrssProblem, Matrix, Poly, SelectionConfig,
    SelectionResult,
};

pub const GCRSS_OK: i32 = 0;
pub const GCRSS_ERR_INVALID_INPUT: i32 = 1;
pub const GCRSS_ERR_DEGENERATE_DIRECTION: i32 = 2;
pub const GCRSS_ERR_DIVISIBILITY: i32 = 3;
pub const GCRSS_ERR_CONDITIONING: i32 = 4;
pub const GCRSS_ERR_TOO_LARGE: i32 = 5;
pub const GCRSS_ERR_RANK_DEFICIENCY: i32 = 6;
pub const GCRSS_ERR_NOT_APPLICABLE: i32 = 7;
pub const GCRSS_ERR_PARSE: i32 = 8;
/// A required pointer argument was null.
pub const GCRSS_ERR_NULL_POINTER: i32 = 9;
/// An output buffer was too small; the required length was still written.
pub const GCRSS_ERR_BUFFER_TOO_SMALL: i32 = 10;
/// The library panicked; this is a bug.
pub const GCRSS_ERR_PANIC: i32 = 11;

/// Dense real matrix.
pub struct GcrssMatrix(Matrix);

/// Outcome of a greedy selection.
pub struct GcrssSelection(SelectionResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(GcrssError),
    Null(&'static str),
    Small(usize),
}

impl From<GcrssError> for Failure {
    fn from(e: GcrssError) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GCRSS_OK,
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            e.code()
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(&format!("null pointer for `{name}`"));
            GCRSS_ERR_NULL_POINTER
        }
        Ok(Err(Failure::Small(need))) => {
            set_error(&format!("output buffer needs {need} elements"));
            GCRSS_ERR_BUFFER_TOO_SMALL
        }
        Err(_) => {
            set_error("internal panic");
            GCRSS_ERR_PANIC
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

unsafe fn put<T>(p: *mut T, v: T, name: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    unsafe { p.write(v) };
    Ok(())
}

/// Copies `src` into `(buf, cap)`, reporting the full length through `len`.
unsafe fn fill<T: Copy>(src: &[T], buf: *mut T, cap: usize, len: *mut usize) -> Result<(), Failure> {
    unsafe { put(len, src.len(), "len")? };
    if src.len() > cap {
        return Err(Failure::Small(src.len()));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    }
    Ok(())
}

/// Message describing the last failure on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn gcrss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gcrss_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Builds a `rows x cols` matrix from `rows * cols` row-major entries.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles (or may be null when
/// that product is zero) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcrss_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut GcrssMatrix,
) -> i32 {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| GcrssError::InvalidInput("matrix size overflows".into()))?;
        let entries: &[f64] = if len == 0 {
            &[]
        } else if data.is_null() {
            return Err(Failure::Null("data"));
        } else {
            unsafe { std::slice::from_raw_parts(data, len) }
        };
        let m = Matrix::from_row_slice(rows, cols, entries);
        unsafe { put(out, Box::into_raw(Box::new(GcrssMatrix(m))), "out") }
    })
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must come from `gcrss_matrix_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gcrss_matrix_free(m: *mut GcrssMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Shape of a matrix.
///
/// # Safety
/// `m` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcrss_matrix_shape(m: *const GcrssMatrix, rows: *mut usize, cols: *mut usize) -> i32 {
    guard(|| {
        let m = &unsafe { get(m, "m") }?.0;
        unsafe {
            put(rows, m.nrows(), "rows")?;
            put(cols, m.ncols(), "cols")
        }
    })
}

unsafe fn problem(
    a: *const GcrssMatrix,
    b: *const GcrssMatrix,
    c: *const GcrssMatrix,
    k: usize,
    r: usize,
) -> Result<GcrssProblem, Failure> {
    let a = unsafe { get(a, "a") }?.0.clone();
    let b = unsafe { get(b, "b") }?.0.clone();
    Ok(match unsafe { c.as_ref() } {
        Some(c) => GcrssProblem::new(a, b, c.0.clone(), k, r)?,
        None if r == 0 => GcrssProblem::gcss(a, b, k)?,
        None => return Err(Failure::Null("c")),
    })
}

/// Greedy selection of `k` columns of `b` and `r` rows of `c`. Pass a null
/// `c` with `r = 0` for column-only selection. `eta` is the root accuracy;
/// pass 0 for the default.
///
/// # Safety
/// Non-null handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcrss_select(
    a: *const GcrssMatrix,
    b: *const GcrssMatrix,
    c: *const GcrssMatrix,
    k: usize,
    r: usize,
    eta: f64,
    out: *mut *mut GcrssSelection,
) -> i32 {
    guard(|| {
        let prob = unsafe { problem(a, b, c, k, r) }?;
        let cfg = if eta == 0.0 { SelectionConfig::default() } else { SelectionConfig::with_eta(eta) };
        let res = select_gcrss(&prob, &cfg)?;
        unsafe { put(out, Box::into_raw(Box::new(GcrssSelection(res))), "out") }
    })
}

/// Releases a selection result. Null is ignored.
///
/// # Safety
/// `s` must come from `gcrss_select` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gcrss_selection_free(s: *mut GcrssSelection) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Selected column indices of `b`, ascending and zero-based. `len` receives
/// the count even when `cap` is too small.
///
/// # Safety
/// `s` must be live; `buf` must hold `cap` elements; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcrss_selection_columns(
    s: *const GcrssSelection,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> i32 {
    guard(|| unsafe { fill(&get(s, "s")?.0.s_sorted(), buf, cap, len) })
}

/// Selected row indices of `c`, ascending and zero-based.
///
/// # Safety
/// As for `gcrss_selection_columns`.
#[no_mangle]
pub unsafe extern "C" fn gcrss_selection_rows(
    s: *const GcrssSelection,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> i32 {
    guard(|| unsafe { fill(&get(s, "s")?.0.r_sorted(), buf, cap, len) })
}

/// Squared spectral norm of the residual and the root bound it satisfies.
///
/// # Safety
/// `s` must be live; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcrss_selection_residual(
    s: *const GcrssSelection,
    spectral_sq: *mut f64,
    maxroot_bound: *mut f64,
) -> i32 {
    guard(|| {
        let s = &unsafe { get(s, "s") }?.0;
        unsafe {
            put(spectral_sq, s.residual_spectral_sq, "spectral_sq")?;
            put(maxroot_bound, s.maxroot_bound, "maxroot_bound")
        }
    })
}

/// Coefficients (ascending) of the expected characteristic polynomial for
/// selecting `k` columns and `r` rows. `len` receives the coefficient count.
///
/// # Safety
/// Handles as for `gcrss_select`; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcrss_expected_poly(
    a: *const GcrssMatrix,
    b: *const GcrssMatrix,
    c: *const GcrssMatrix,
    k: usize,
    r: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> i32 {
    guard(|| {
        let prob = unsafe { problem(a, b, c, k, r) }?;
        let p = expected_poly(&prob, None)?;
        unsafe { fill(p.coeffs(), buf, cap, len) }
    })
}

/// Largest real root, to within `eta`, of the polynomial with `len`
/// ascending coefficients.
///
/// # Safety
/// `coeffs` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gcrss_maxroot(coeffs: *const f64, len: usize, eta: f64, out: *mut f64) -> i32 {
    guard(|| {
        if len > 0 && coeffs.is_null() {
            return Err(Failure::Null("coeffs"));
        }
        let c = if len == 0 { Vec::new() } else { unsafe { std::slice::from_raw_parts(coeffs, len) }.to_vec() };
        let root = maxroot(&Poly::new(c), eta)?;
        unsafe { put(out, root, "out") }
    })
}
