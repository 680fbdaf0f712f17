//! Brute-force and combinatorial oracles used for verification.

use itertools::Itertools;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{invalid, GcrssError, Result};
use crate::expected::{
    enumeration_count, expected_poly_definition, factorial, GcrssProblem, ENUMERATION_LIMIT,
};
use crate::linalg::{
    charpoly_symmetric, column_projector, numeric_rank, row_projector,
    spectral_norm, Matrix, RANK_TOL,
};
use crate::poly::{derivative, monomial_shift, Poly};

/// Largest number of variables of a [`MultiAffinePoly`].
pub const MULTIAFFINE_MAX_VARS: usize = 16;
/// Largest rank accepted by [`multiaffine_convolution_check`].
pub const MULTIAFFINE_CHECK_LIMIT: usize = 12;
/// Largest dimension accepted by [`thompson_identity_check`].
pub const THOMPSON_LIMIT: usize = 8;

/// `det[M_{:,S}^T M_{:,S}]`, clamped at zero; 1 for the empty set.
pub fn volume_weight(m: &Matrix, s: &[usize]) -> Result<f64> {
    if let Some(&bad) = s.iter().find(|&&i| i >= m.ncols()) {
        return invalid(format!("column {bad} out of range"));
    }
    if s.is_empty() {
        return Ok(1.0);
    }
    let sub = m.select_columns(s);
    Ok(sub.tr_mul(&sub).determinant().max(0.0))
}

/// Exhaustive minimizer of `||Q_S A P_R||_2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub s: Vec<usize>,
    pub r: Vec<usize>,
    pub value: f64,
}

/// Lexicographically first minimizer over all `|S| = k`, `|R| = r`.
pub fn enumerate_optimum(prob: &GcrssProblem) -> Result<Optimum> {
    let count = enumeration_count(prob);
    if count > ENUMERATION_LIMIT {
        return Err(GcrssError::TooLarge(format!("{count} subset pairs exceed the enumeration limit")));
    }
    let rows: Vec<(Vec<usize>, Matrix)> = (0..prob.n_c())
        .combinations(prob.r)
        .map(|r| row_projector(&prob.c, &r, RANK_TOL).map(|p| (r, p.mat)))
        .collect::<Result<_>>()?;
    let mut best: Option<Optimum> = None;
    for s in (0..prob.d_b()).combinations(prob.k) {
        let qa = column_projector(&prob.b, &s, RANK_TOL)?.mat * &prob.a;
        for (r, p) in &rows {
            let v = spectral_norm(&(&qa * p));
            if best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(Optimum { s: s.clone(), r: r.clone(), value: v });
            }
        }
    }
    best.ok_or_else(|| GcrssError::InvalidInput("no subset pairs to enumerate".into()))
}

/// Multi-affine polynomial in `m` variables stored densely by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiAffinePoly {
    m: usize,
    coeffs: Vec<f64>,
}

impl MultiAffinePoly {
    pub fn zero(m: usize) -> Result<Self> {
        if m > MULTIAFFINE_MAX_VARS {
            return Err(GcrssError::TooLarge(format!("{m} variables exceed {MULTIAFFINE_MAX_VARS}")));
        }
        Ok(MultiAffinePoly { m, coeffs: vec![0.0; 1 << m] })
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, v: f64) {
        self.coeffs[mask] = v;
    }

    /// `det[Z - M]` with `Z = diag(z_1..z_m)`: the coefficient of `Z^T` is
    /// `(-1)^{m-|T|}` times the principal minor of `M` on the complement of `T`.
    pub fn det_diag_minus(mm: &Matrix) -> Result<Self> {
        let m = mm.nrows();
        let mut out = Self::zero(m)?;
        let full = (1usize << m) - 1;
        for t in 0..=full {
            let comp: Vec<usize> = (0..m).filter(|i| full & !t & (1 << i) != 0).collect();
            let minor = if comp.is_empty() {
                1.0
            } else {
                mm.select_rows(&comp).select_columns(&comp).determinant()
            };
            let sign = if comp.len() % 2 == 1 { -1.0 } else { 1.0 };
            out.coeffs[t] = sign * minor;
        }
        Ok(out)
    }

    /// `(prod_i d/dz_i) (self * other)` at `z_i = x / 2`, as a polynomial in `x`:
    /// the sum of `a_S b_T x^{|S ∩ T|}` over `S ∪ T = [m]`.
    pub fn convolve_on_diagonal(&self, other: &MultiAffinePoly) -> Result<Poly> {
        if self.m != other.m {
            return invalid("variable counts differ");
        }
        let full = (1usize << self.m) - 1;
        let mut c = vec![0.0; self.m + 1];
        for s in 0..=full {
            let a = self.coeffs[s];
            if a == 0.0 {
                continue;
            }
            let missing = full & !s;
            // T = missing ∪ U with U ⊂ S
            let mut u = s;
            loop {
                let t = missing | u;
                c[u.count_ones() as usize] += a * other.coeffs[t];
                if u == 0 {
                    break;
                }
                u = (u - 1) & s;
            }
        }
        Ok(Poly::new(c).cleaned())
    }
}

/// Both sides of the multi-affine form of `P_k(x; B B^+ A, B)`: the
/// definition route, and `x^{d+k-m}/k!` times the diagonal convolution of
/// `h_k` with `det[Z - U^T A A^T U]`.
pub fn multiaffine_convolution_check(a: &Matrix, b: &Matrix, k: usize) -> Result<(Poly, Poly)> {
    if a.nrows() != b.nrows() {
        return invalid("A and B must have the same number of rows");
    }
    let m = numeric_rank(b, RANK_TOL);
    if m > MULTIAFFINE_CHECK_LIMIT {
        return Err(GcrssError::TooLarge(format!("rank {m} exceeds {MULTIAFFINE_CHECK_LIMIT}")));
    }
    if k > m {
        return invalid(format!("k = {k} exceeds rank(B) = {m}"));
    }
    let (u, bvals) = left_singular_basis(b, m);
    let proj_a = &u * u.tr_mul(a);
    let left = expected_poly_definition(&GcrssProblem::gcss(proj_a, b.clone(), k)?)?;
    let ua = u.tr_mul(a);
    let det = MultiAffinePoly::det_diag_minus(&(&ua * ua.transpose()))?;
    let mut h = MultiAffinePoly::zero(m)?;
    let full = (1usize << m) - 1;
    for s in 0..=full {
        if s.count_ones() as usize == m - k {
            let prod: f64 = (0..m).filter(|i| s & (1 << i) == 0).map(|i| bvals[i]).product();
            h.set(s, factorial(k) * prod);
        }
    }
    let conv = h.convolve_on_diagonal(&det)?;
    let shift = a.ncols() as i64 + k as i64 - m as i64;
    let right = monomial_shift(&conv, shift)?.scale(1.0 / factorial(k));
    Ok((left, right))
}

/// Leading `m` left singular vectors and squared singular values, descending.
pub fn left_singular_basis(b: &Matrix, m: usize) -> (Matrix, Vec<f64>) {
    let svd = b.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let order = &order[..m];
    let vals = order.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
    (u.select_columns(order), vals)
}

/// Both sides of the principal-minor identity
/// `sum_{|S| = d-k} det[x I - M_{S,S}] = (1/k!) d^k det[x I - M]`.
pub fn thompson_identity_check(m: &Matrix, k: usize) -> Result<(Poly, Poly)> {
    let d = m.nrows();
    if !m.is_square() {
        return invalid("matrix must be square");
    }
    if d > THOMPSON_LIMIT {
        return Err(GcrssError::TooLarge(format!("dimension {d} exceeds {THOMPSON_LIMIT}")));
    }
    if k > d {
        return invalid(format!("k = {k} exceeds dimension {d}"));
    }
    let mut sum = Poly::zero();
    for s in (0..d).combinations(d - k) {
        let sub = m.select_rows(&s).select_columns(&s);
        sum = sum.add(&charpoly_symmetric(&sub));
    }
    let right = derivative(&charpoly_symmetric(m), k).scale(1.0 / factorial(k));
    Ok((sum, right))
}

/// Matrix with independent standard normal entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random problem with dimensions drawn from the given inclusive ranges and
/// sizes `k`, `r` left at zero.
pub fn random_problem<R: Rng + ?Sized>(
    rng: &mut R,
    max_nd: usize,
    max_sources: usize,
) -> GcrssProblem {
    let n = rng.random_range(1..=max_nd);
    let d = rng.random_range(1..=max_nd);
    let db = rng.random_range(1..=max_sources);
    let nc = rng.random_range(1..=max_sources);
    let a = random_matrix(rng, n, d);
    let b = random_matrix(rng, n, db);
    let c = random_matrix(rng, nc, d);
    GcrssProblem::new(a, b, c, 0, 0).expect("random dimensions are consistent")
}

/// Random symmetric matrix.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let g = random_matrix(rng, d, d);
    (&g + g.transpose()) * 0.5
}
