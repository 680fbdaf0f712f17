//! Generalized column and row subset selection in spectral norm via
//! expected characteristic polynomials and interlacing families.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expected;
mod interp;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod selection;

pub use error::{GcrssError, Result};
pub use expected::{expected_poly, GcrssProblem, PolyPath};
pub use linalg::Matrix;
pub use poly::Poly;
pub use selection::{
    bound_gcss, bound_submatrix, laguerre_maxroot_bound, select_css, select_gcrss, select_gcss,
    select_submatrix, BoundReport, SelectionConfig, SelectionResult, SubmatrixResult,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
