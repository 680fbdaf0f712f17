use std::ffi::CStr;
use std::ptr;

use gcrss_ffi::*;

fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut GcrssMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gcrss_matrix_new(rows, cols, data.as_ptr(), &mut m) }, GCRSS_OK);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gcrss_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn worked_example_through_handles() {
    let eye = [1.0, 0.0, 0.0, 1.0];
    let (a, b, c) = (matrix(2, 2, &eye), matrix(2, 2, &eye), matrix(2, 2, &eye));
    let mut sel = ptr::null_mut();
    assert_eq!(unsafe { gcrss_select(a, b, c, 1, 1, 1e-8, &mut sel) }, GCRSS_OK);
    let (mut cols, mut rows, mut len) = ([9usize; 2], [9usize; 2], 0usize);
    assert_eq!(unsafe { gcrss_selection_columns(sel, cols.as_mut_ptr(), 2, &mut len) }, GCRSS_OK);
    assert_eq!((len, cols[0]), (1, 0));
    assert_eq!(unsafe { gcrss_selection_rows(sel, rows.as_mut_ptr(), 2, &mut len) }, GCRSS_OK);
    assert_eq!((len, rows[0]), (1, 1));
    let (mut res, mut bound) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { gcrss_selection_residual(sel, &mut res, &mut bound) }, GCRSS_OK);
    assert!(res.abs() < 1e-12 && (bound - 0.5).abs() < 1e-7);

    let mut coeffs = [0.0; 4];
    assert_eq!(unsafe { gcrss_expected_poly(a, b, c, 1, 1, coeffs.as_mut_ptr(), 4, &mut len) }, GCRSS_OK);
    assert_eq!(len, 3);
    for (got, want) in coeffs[..3].iter().zip([0.0, -2.0, 4.0]) {
        assert!((got - want).abs() < 1e-10);
    }
    let mut root = 0.0;
    assert_eq!(unsafe { gcrss_maxroot(coeffs.as_ptr(), len, 1e-9, &mut root) }, GCRSS_OK);
    assert!((root - 0.5).abs() < 1e-9);

    unsafe {
        gcrss_selection_free(sel);
        gcrss_matrix_free(a);
        gcrss_matrix_free(b);
        gcrss_matrix_free(c);
    }
}

#[test]
fn column_only_selection_with_null_c() {
    let a = matrix(2, 2, &[1.0, 0.0, 0.0, 2.0]);
    let b = matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]);
    let mut sel = ptr::null_mut();
    assert_eq!(unsafe { gcrss_select(a, b, ptr::null(), 1, 0, 0.0, &mut sel) }, GCRSS_OK);
    let (mut col, mut len) = (0usize, 0usize);
    assert_eq!(unsafe { gcrss_selection_columns(sel, &mut col, 1, &mut len) }, GCRSS_OK);
    assert_eq!((len, col), (1, 1));
    unsafe {
        gcrss_selection_free(sel);
        gcrss_matrix_free(a);
        gcrss_matrix_free(b);
    }
}

#[test]
fn error_codes_and_messages() {
    let a = matrix(2, 3, &[1.0; 6]);
    let (mut rows, mut cols) = (0, 0);
    assert_eq!(unsafe { gcrss_matrix_shape(a, &mut rows, &mut cols) }, GCRSS_OK);
    assert_eq!((rows, cols), (2, 3));

    let mut sel = ptr::null_mut();
    assert_eq!(unsafe { gcrss_select(a, ptr::null(), ptr::null(), 1, 0, 0.0, &mut sel) }, GCRSS_ERR_NULL_POINTER);
    assert!(last_error().contains('b'));
    assert!(sel.is_null());

    // B has the wrong number of rows.
    let b = matrix(3, 1, &[1.0; 3]);
    assert_eq!(unsafe { gcrss_select(a, b, ptr::null(), 1, 0, 0.0, &mut sel) }, GCRSS_ERR_INVALID_INPUT);
    assert!(!last_error().is_empty());

    let bad = [1.0, f64::NAN];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gcrss_matrix_new(1, 2, bad.as_ptr(), &mut m) }, GCRSS_OK);
    let b2 = matrix(1, 1, &[1.0]);
    assert_eq!(unsafe { gcrss_select(m, b2, ptr::null(), 1, 0, 0.0, &mut sel) }, GCRSS_ERR_INVALID_INPUT);

    let mut root = 0.0;
    assert_eq!(unsafe { gcrss_maxroot([2.0].as_ptr(), 1, 1e-6, &mut root) }, GCRSS_ERR_INVALID_INPUT);
    assert_eq!(unsafe { gcrss_maxroot(ptr::null(), 3, 1e-6, &mut root) }, GCRSS_ERR_NULL_POINTER);

    unsafe {
        gcrss_matrix_free(a);
        gcrss_matrix_free(b);
        gcrss_matrix_free(b2);
        gcrss_matrix_free(m);
        gcrss_matrix_free(ptr::null_mut());
        gcrss_selection_free(ptr::null_mut());
    }
}

#[test]
fn short_buffer_reports_required_length() {
    let eye = [1.0, 0.0, 0.0, 1.0];
    let (a, b, c) = (matrix(2, 2, &eye), matrix(2, 2, &eye), matrix(2, 2, &eye));
    let (mut buf, mut len) = ([0.0; 1], 0usize);
    let status = unsafe { gcrss_expected_poly(a, b, c, 1, 1, buf.as_mut_ptr(), 1, &mut len) };
    assert_eq!(status, GCRSS_ERR_BUFFER_TOO_SMALL);
    assert_eq!(len, 3);
    unsafe {
        gcrss_matrix_free(a);
        gcrss_matrix_free(b);
        gcrss_matrix_free(c);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gcrss_version()) }.to_str().unwrap();
    assert_eq!(v, gcrss::VERSION);
}
