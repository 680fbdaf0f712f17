//! Dense linear algebra: Gram products, projectors, rank-one downdates, norms.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, GcrssError, Result};
use crate::expected::GcrssProblem;
use crate::poly::Poly;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative pivot threshold of the rank-revealing QR.
pub const RANK_TOL: f64 = 1e-9;
/// Absolute norm below which a source column counts as zero.
pub const ZERO_COLUMN_TOL: f64 = 1e-12;
/// Downdates between re-symmetrization passes.
pub const REPROJECT_EVERY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `M M^T`
    Left,
    /// `M^T M`
    Right,
}

pub fn check_finite(m: &Matrix, name: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        invalid(format!("{name} has non-finite entries"))
    }
}

pub fn gram(m: &Matrix, side: Side) -> Matrix {
    match side {
        Side::Right => m.tr_mul(m),
        Side::Left => m * m.transpose(),
    }
}

/// Householder QR with column-norm pivoting. Returns an orthonormal basis of
/// the numerical column span and its dimension.
pub fn pivoted_qr_basis(m: &Matrix, tol: f64) -> (Matrix, usize) {
    let (n, p) = m.shape();
    let mut a = m.clone();
    let mut reflectors: Vec<Vector> = Vec::new();
    let mut r00 = 0.0;
    for j in 0..n.min(p) {
        let (piv, nrm) = (j..p)
            .map(|c| (c, a.view((j, c), (n - j, 1)).norm()))
            .fold((j, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if j == 0 {
            r00 = nrm;
        }
        if !(nrm > tol * r00) || nrm == 0.0 {
            break;
        }
        a.swap_columns(j, piv);
        let mut v = a.view((j, j), (n - j, 1)).clone_owned();
        let alpha = if v[0] >= 0.0 { -nrm } else { nrm };
        v[0] -= alpha;
        let vn2 = v.norm_squared();
        if vn2 > 0.0 {
            let mut block = a.view_mut((j, j), (n - j, p - j));
            let proj = v.tr_mul(&block) * (2.0 / vn2);
            block -= &v * proj;
        }
        let mut full = Vector::zeros(n);
        full.rows_mut(j, n - j).copy_from(&v.column(0));
        reflectors.push(full);
    }
    let rank = reflectors.len();
    let mut q = Matrix::identity(n, rank);
    for v in reflectors.iter().rev() {
        let vn2 = v.norm_squared();
        if vn2 > 0.0 {
            let proj = v.tr_mul(&q) * (2.0 / vn2);
            q -= v * proj;
        }
    }
    (q, rank)
}

pub fn numeric_rank(m: &Matrix, tol: f64) -> usize {
    pivoted_qr_basis(m, tol).1
}

/// An orthogonal projector with its rank and construction tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub mat: Matrix,
    pub rank: usize,
    pub tol: f64,
}

impl Projector {
    pub fn identity(dim: usize, tol: f64) -> Self {
        Projector { mat: Matrix::identity(dim, dim), rank: dim, tol }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.mat * v
    }

    fn reproject(&mut self) {
        let sym = (&self.mat + self.mat.transpose()) * 0.5;
        self.mat = &sym * &sym;
    }
}

/// `I - M M^+` via pivoted QR. An empty `M` yields the identity.
pub fn projector_complement_colspan(m: &Matrix, tol: f64) -> Result<Projector> {
    check_finite(m, "matrix")?;
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let n = m.nrows();
    let (q, rank) = pivoted_qr_basis(m, tol);
    let mat = Matrix::identity(n, n) - &q * q.transpose();
    Ok(Projector { mat, rank: n - rank, tol })
}

/// `I - M^+ M`, the complement of the row span.
pub fn projector_complement_rowspan(m: &Matrix, tol: f64) -> Result<Projector> {
    projector_complement_colspan(&m.transpose(), tol)
}

pub fn select_columns(m: &Matrix, idx: &[usize]) -> Matrix {
    m.select_columns(idx)
}

pub fn select_rows(m: &Matrix, idx: &[usize]) -> Matrix {
    m.select_rows(idx)
}

/// Admissibility threshold for a source direction of norm `norm`.
pub fn degeneracy_threshold(norm: f64, tol: f64) -> f64 {
    if norm <= ZERO_COLUMN_TOL {
        ZERO_COLUMN_TOL
    } else {
        tol * norm
    }
}

/// Column-side state of the greedy iteration: `Q_S`, `V = B B^T Q_S` and
/// `W = [A; C] P_R [A^T Q_S, C^T]`.
#[derive(Debug, Clone)]
pub struct SubsetState {
    pub subset: Vec<usize>,
    pub projector: Projector,
    pub v: Matrix,
    pub w: Matrix,
    updates: usize,
}

impl SubsetState {
    /// State for `S = R = ∅`.
    pub fn initial(a: &Matrix, b: &Matrix, c: &Matrix, tol: f64) -> Self {
        let n = a.nrows();
        let stacked = stack_rows(a, c);
        SubsetState {
            subset: Vec::new(),
            projector: Projector::identity(n, tol),
            v: gram(b, Side::Left),
            w: &stacked * stacked.transpose(),
            updates: 0,
        }
    }

    pub fn from_parts(subset: Vec<usize>, projector: Projector, v: Matrix, w: Matrix) -> Self {
        SubsetState { subset, projector, v, w, updates: 0 }
    }
}

/// Vertical concatenation `[A; C]`.
pub fn stack_rows(a: &Matrix, c: &Matrix) -> Matrix {
    let d = a.ncols();
    let mut out = Matrix::zeros(a.nrows() + c.nrows(), d);
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), c.nrows()).copy_from(c);
    out
}

/// Appends one source column: `Q <- Q - q q^T` with the matching cache updates.
pub fn projector_rank_one_downdate(
    state: &SubsetState,
    index: usize,
    col: &Vector,
    tol: f64,
) -> Result<SubsetState> {
    let qb = state.projector.apply(col);
    let nq = qb.norm();
    if !(nq > degeneracy_threshold(col.norm(), tol)) {
        return Err(GcrssError::DegenerateDirection(format!(
            "column {index} is annihilated by the current projector"
        )));
    }
    let q = qb / nq;
    let n = q.len();
    let mut projector = state.projector.clone();
    projector.mat -= &q * q.transpose();
    projector.rank = projector.rank.saturating_sub(1);
    let vq = &state.v * &q;
    let v = &state.v - vq * q.transpose();
    let wq = state.w.columns(0, n) * &q;
    let mut w = state.w.clone();
    w.columns_mut(0, n).ger(-1.0, &wq, &q, 1.0);
    let updates = state.updates + 1;
    if updates.is_multiple_of(REPROJECT_EVERY) {
        projector.reproject();
    }
    let mut subset = state.subset.clone();
    subset.push(index);
    Ok(SubsetState { subset, projector, v, w, updates })
}

/// Row-side state: `P_R`, `H1 = [A; C] P_R` and `H2 = P_R [A^T Q_S, C^T]`.
#[derive(Debug, Clone)]
pub struct RowState {
    pub subset: Vec<usize>,
    pub projector: Projector,
    pub h1: Matrix,
    pub h2: Matrix,
    updates: usize,
}

impl RowState {
    pub fn initial(a: &Matrix, c: &Matrix, q: &Projector, tol: f64) -> Self {
        let d = a.ncols();
        let h1 = stack_rows(a, c);
        let mut h2 = Matrix::zeros(d, a.nrows() + c.nrows());
        h2.columns_mut(0, a.nrows()).copy_from(&(a.transpose() * &q.mat));
        h2.columns_mut(a.nrows(), c.nrows()).copy_from(&c.transpose());
        RowState { subset: Vec::new(), projector: Projector::identity(d, tol), h1, h2, updates: 0 }
    }
}

/// Appends one source row: `P <- P - p p^T`, returning the new row state and `W`.
pub fn projector_rank_one_downdate_row(
    state: &RowState,
    w: &Matrix,
    index: usize,
    row: &Vector,
    tol: f64,
) -> Result<(RowState, Matrix)> {
    let pc = state.projector.apply(row);
    let np = pc.norm();
    if !(np > degeneracy_threshold(row.norm(), tol)) {
        return Err(GcrssError::DegenerateDirection(format!(
            "row {index} is annihilated by the current projector"
        )));
    }
    let p = pc / np;
    let h1p = &state.h1 * &p;
    let pth2 = p.tr_mul(&state.h2);
    let w_new = w - &h1p * &pth2;
    let h1 = &state.h1 - &h1p * p.transpose();
    let h2 = &state.h2 - &p * &pth2;
    let mut projector = state.projector.clone();
    projector.mat -= &p * p.transpose();
    projector.rank = projector.rank.saturating_sub(1);
    let updates = state.updates + 1;
    if updates.is_multiple_of(REPROJECT_EVERY) {
        projector.reproject();
    }
    let mut subset = state.subset.clone();
    subset.push(index);
    Ok((RowState { subset, projector, h1, h2, updates }, w_new))
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn frobenius_norm_sq(m: &Matrix) -> f64 {
    m.norm_squared()
}

fn check_indices(idx: &[usize], bound: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; bound];
    for &i in idx {
        if i >= bound {
            return invalid(format!("{what} index {i} out of range 0..{bound}"));
        }
        if seen[i] {
            return invalid(format!("duplicate {what} index {i}"));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `Q_S` for the columns `S` of `B`.
pub fn column_projector(b: &Matrix, s: &[usize], tol: f64) -> Result<Projector> {
    check_indices(s, b.ncols(), "column")?;
    projector_complement_colspan(&b.select_columns(s), tol)
}

/// `P_R` for the rows `R` of `C`.
pub fn row_projector(c: &Matrix, r: &[usize], tol: f64) -> Result<Projector> {
    check_indices(r, c.nrows(), "row")?;
    projector_complement_rowspan(&c.select_rows(r), tol)
}

/// `Q_S A P_R` (zero-based indices).
pub fn residual_matrix(prob: &GcrssProblem, s: &[usize], r: &[usize]) -> Result<Matrix> {
    let q = column_projector(&prob.b, s, RANK_TOL)?;
    let p = row_projector(&prob.c, r, RANK_TOL)?;
    Ok(&q.mat * &prob.a * &p.mat)
}

/// `det[x I_d - M^T M]` from the singular values of `M`.
pub fn charpoly_gram(m: &Matrix) -> Poly {
    let d = m.ncols();
    let mut roots = vec![0.0; d];
    if !m.is_empty() {
        let sv = m.clone().singular_values();
        for (i, s) in sv.iter().enumerate().take(d) {
            roots[i] = s * s;
        }
    }
    Poly::from_roots(&roots)
}

/// `det[x I - M]` for symmetric `M` from its eigenvalues.
pub fn charpoly_symmetric(m: &Matrix) -> Poly {
    if m.is_empty() {
        return Poly::one();
    }
    let eig = m.clone().symmetric_eigenvalues();
    Poly::from_roots(eig.as_slice())
}

/// Faddeev–LeVerrier characteristic polynomial; reliable only for small sizes.
pub fn charpoly_faddeev(m: &Matrix) -> Result<Poly> {
    let d = m.nrows();
    if m.ncols() != d {
        return invalid("characteristic polynomial of a non-square matrix");
    }
    if d > 30 {
        return Err(GcrssError::TooLarge(format!("Faddeev-LeVerrier limited to d <= 30, got {d}")));
    }
    let mut c = vec![0.0; d + 1];
    c[d] = 1.0;
    let mut mk = Matrix::zeros(d, d);
    for k in 1..=d {
        let mut next = m * &mk;
        for i in 0..d {
            next[(i, i)] += c[d - k + 1];
        }
        mk = next;
        c[d - k] = -(m * &mk).trace() / k as f64;
    }
    Ok(Poly::new(c))
}
