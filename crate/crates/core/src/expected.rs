//! Expected characteristic polynomials `P_{k,r}(x; A, B, C)` by several
//! equivalent routes.
//!
//! The interpolation-based routes rescale `A`, `B` and `C` to unit spectral
//! norm before evaluating determinants and undo the scaling on the
//! coefficients afterwards:
//! `coef_j P(aA, bB, cC) = b^{2k} c^{2r} a^{2(d-j)} coef_j P(A, B, C)`.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GcrssError, Result};
use crate::interp::{balanced_radius, extract_xyw, extract_xyw_scaled};
use crate::linalg::{
    charpoly_gram, check_finite, column_projector, gram, numeric_rank, residual_matrix,
    row_projector, spectral_norm, stack_rows, Matrix, Side, RANK_TOL,
};
use crate::oracle::volume_weight;
use crate::poly::{derivative, flip, monomial_shift, Poly};

/// Upper limit on `C(d_B, k) * C(n_C, r)` for subset enumeration.
pub const ENUMERATION_LIMIT: f64 = 1e6;
/// Upper limit on `d_B + n_C + n + d` for the block-determinant route.
pub const H_DETERMINANT_LIMIT: usize = 40;
/// Tolerance for recognizing identity or coinciding source matrices.
pub const SOURCE_MATCH_TOL: f64 = 1e-12;

/// Target `A` (n x d), column source `B` (n x d_B), row source `C` (n_C x d)
/// and the subset sizes `k`, `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcrssProblem {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub k: usize,
    pub r: usize,
}

/// Spectral norms used to normalize a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn norm_or_one(m: &Matrix) -> f64 {
    let s = spectral_norm(m);
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

impl GcrssProblem {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, k: usize, r: usize) -> Result<Self> {
        let (n, d) = a.shape();
        if n == 0 || d == 0 {
            return invalid("A must be nonempty");
        }
        if b.nrows() != n {
            return invalid(format!("B has {} rows, A has {n}", b.nrows()));
        }
        if c.ncols() != d {
            return invalid(format!("C has {} columns, A has {d}", c.ncols()));
        }
        check_finite(&a, "A")?;
        check_finite(&b, "B")?;
        check_finite(&c, "C")?;
        let rb = numeric_rank(&b, RANK_TOL);
        if k > rb {
            return invalid(format!("k = {k} exceeds rank(B) = {rb}"));
        }
        let rc = numeric_rank(&c, RANK_TOL);
        if r > rc {
            return invalid(format!("r = {r} exceeds rank(C) = {rc}"));
        }
        Ok(GcrssProblem { a, b, c, k, r })
    }

    /// Column-only problem: `C` is empty and `r = 0`.
    pub fn gcss(a: Matrix, b: Matrix, k: usize) -> Result<Self> {
        let d = a.ncols();
        Self::new(a, b, Matrix::zeros(0, d), k, 0)
    }

    /// Skips rank validation; for derived problems whose ranks are known.
    pub(crate) fn unchecked(a: Matrix, b: Matrix, c: Matrix, k: usize, r: usize) -> Self {
        GcrssProblem { a, b, c, k, r }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn d(&self) -> usize {
        self.a.ncols()
    }
    pub fn d_b(&self) -> usize {
        self.b.ncols()
    }
    pub fn n_c(&self) -> usize {
        self.c.nrows()
    }

    pub fn with_sizes(&self, k: usize, r: usize) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), self.c.clone(), k, r)
    }

    /// `(A^T, C^T, B^T)` with `k` and `r` swapped.
    pub fn transposed(&self) -> Self {
        GcrssProblem {
            a: self.a.transpose(),
            b: self.c.transpose(),
            c: self.b.transpose(),
            k: self.r,
            r: self.k,
        }
    }

    pub fn scale(&self) -> Scale {
        Scale { a: norm_or_one(&self.a), b: norm_or_one(&self.b), c: norm_or_one(&self.c) }
    }

    /// Problem with each matrix divided by its spectral norm.
    pub fn normalized(&self) -> (Self, Scale) {
        let s = self.scale();
        let p = GcrssProblem {
            a: &self.a / s.a,
            b: &self.b / s.b,
            c: &self.c / s.c,
            k: self.k,
            r: self.r,
        };
        (p, s)
    }

    pub fn sources_are_identity(&self) -> bool {
        self.n() == self.d() && is_identity(&self.b) && is_identity(&self.c)
    }

    pub fn column_source_is_target(&self) -> bool {
        approx_equal(&self.a, &self.b)
    }
}

pub fn is_identity(m: &Matrix) -> bool {
    m.is_square() && (m - Matrix::identity(m.nrows(), m.ncols())).abs().max() <= SOURCE_MATCH_TOL
}

pub fn approx_equal(a: &Matrix, b: &Matrix) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (a - b).abs().max() <= SOURCE_MATCH_TOL * a.abs().max().max(1.0)
}

/// Undoes the normalization of [`GcrssProblem::normalized`] on coefficients.
pub fn unscale(p: &Poly, d: usize, k: usize, r: usize, s: &Scale) -> Poly {
    let base = s.b.powi(2 * k as i32) * s.c.powi(2 * r as i32);
    let a2 = s.a * s.a;
    let c = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &v)| v * base * a2.powi(d as i32 - j as i32))
        .collect();
    Poly::new(c)
}

/// Index below which every coefficient of `P_{k,r}` vanishes, since each
/// residual has rank at most `min(n - k, d - r)`.
pub fn structural_floor(n: usize, d: usize, k: usize, r: usize) -> usize {
    d - n.saturating_sub(k).min(d.saturating_sub(r))
}

/// Sets the coefficients of degree below `m` to zero.
pub fn zero_below(p: &Poly, m: usize) -> Poly {
    let mut c = p.coeffs().to_vec();
    c.iter_mut().take(m).for_each(|v| *v = 0.0);
    Poly::new(c)
}

/// Computation route for `P_{k,r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolyPath {
    Definition,
    BivariateGcrss,
    #[serde(rename = "gcss-1d")]
    Gcss1d,
    CssFlip,
    IdentityLaguerre,
    HDeterminant,
}

impl PolyPath {
    pub const ALL: [PolyPath; 6] = [
        PolyPath::Definition,
        PolyPath::BivariateGcrss,
        PolyPath::Gcss1d,
        PolyPath::CssFlip,
        PolyPath::IdentityLaguerre,
        PolyPath::HDeterminant,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PolyPath::Definition => "definition",
            PolyPath::BivariateGcrss => "bivariate-gcrss",
            PolyPath::Gcss1d => "gcss-1d",
            PolyPath::CssFlip => "css-flip",
            PolyPath::IdentityLaguerre => "identity-laguerre",
            PolyPath::HDeterminant => "h-determinant",
        }
    }

    /// Whether this route can evaluate `prob`.
    pub fn applies_to(&self, prob: &GcrssProblem) -> bool {
        match self {
            PolyPath::Definition => enumeration_count(prob) <= ENUMERATION_LIMIT,
            PolyPath::BivariateGcrss => true,
            PolyPath::Gcss1d => prob.r == 0,
            PolyPath::CssFlip => prob.r == 0 && prob.column_source_is_target(),
            PolyPath::IdentityLaguerre => prob.sources_are_identity(),
            PolyPath::HDeterminant => {
                prob.n() + prob.d() + prob.d_b() + prob.n_c() <= H_DETERMINANT_LIMIT
            }
        }
    }
}

impl fmt::Display for PolyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolyPath {
    type Err = GcrssError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "definition" => Ok(PolyPath::Definition),
            "bivariate-gcrss" | "bivariate" => Ok(PolyPath::BivariateGcrss),
            "gcss-1d" | "gcss" => Ok(PolyPath::Gcss1d),
            "css-flip" | "css" => Ok(PolyPath::CssFlip),
            "identity-laguerre" | "identity" => Ok(PolyPath::IdentityLaguerre),
            "h-determinant" => Ok(PolyPath::HDeterminant),
            other => invalid(format!("unknown path '{other}'")),
        }
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Number of `(S, R)` pairs of the enumeration.
pub fn enumeration_count(prob: &GcrssProblem) -> f64 {
    binomial(prob.d_b(), prob.k) * binomial(prob.n_c(), prob.r)
}

/// `p_{S,R}(x) = det[x I_d - (Q_S A P_R)^T (Q_S A P_R)]`.
pub fn subset_poly(prob: &GcrssProblem, s: &[usize], r: &[usize]) -> Result<Poly> {
    Ok(charpoly_gram(&residual_matrix(prob, s, r)?))
}

/// Volume-weighted sum of `p_{S,R}` over all `|S| = k`, `|R| = r`.
pub fn expected_poly_definition(prob: &GcrssProblem) -> Result<Poly> {
    let count = enumeration_count(prob);
    if count > ENUMERATION_LIMIT {
        return Err(GcrssError::TooLarge(format!("{count} subset pairs exceed the enumeration limit")));
    }
    let d = prob.d();
    let mut columns = Vec::new();
    for s in (0..prob.d_b()).combinations(prob.k) {
        let w = volume_weight(&prob.b, &s)?;
        if w > 0.0 {
            columns.push((w, column_projector(&prob.b, &s, RANK_TOL)?.mat));
        }
    }
    let ct = prob.c.transpose();
    let mut acc = vec![0.0; d + 1];
    for r in (0..prob.n_c()).combinations(prob.r) {
        let wc = volume_weight(&ct, &r)?;
        if wc <= 0.0 {
            continue;
        }
        let ap = &prob.a * row_projector(&prob.c, &r, RANK_TOL)?.mat;
        for (wb, q) in &columns {
            let p = charpoly_gram(&(q * &ap));
            for (j, v) in p.coeffs().iter().enumerate() {
                acc[j] += wc * wb * v;
            }
        }
    }
    Ok(Poly::new(acc).cleaned())
}

fn as_conditioning(e: GcrssError) -> GcrssError {
    match e {
        GcrssError::Divisibility(m) => GcrssError::Conditioning(m),
        other => other,
    }
}

/// `(-1)^r x^{d-n+k} [y^k w^{n_C-r}] det[diag(x I_n + y V, w I_{n_C}) - W]`,
/// evaluated on already-normalized caches. Coefficients below `floor` are
/// known to vanish and are cleared.
#[allow(clippy::too_many_arguments)]
pub(crate) fn bivariate_from_cache(
    v: &Matrix,
    w: &Matrix,
    n: usize,
    n_c: usize,
    d: usize,
    k: usize,
    r: usize,
    floor: usize,
) -> Result<Poly> {
    if k > n || r > n_c {
        return Ok(Poly::zero());
    }
    let dim = n + n_c;
    let fill = |x: Complex64, y: Complex64, z: Complex64, buf: &mut [Complex64]| {
        for i in 0..dim {
            for j in 0..dim {
                buf[i * dim + j] = Complex64::new(-w[(i, j)], 0.0);
            }
        }
        for i in 0..n {
            for j in 0..n {
                buf[i * dim + j] += y * v[(i, j)];
            }
            buf[i * dim + i] += x;
        }
        for i in n..dim {
            buf[i * dim + i] += z;
        }
    };
    let ry = radius_for(v, k);
    let rw = if n_c == 0 {
        1.0
    } else {
        let wcc = w.view((n, n), (n_c, n_c)).clone_owned();
        1.0 / balanced_radius(wcc.symmetric_eigenvalues().as_slice(), r)
    };
    let coeffs = extract_xyw_scaled(dim, n - k, (k, n, ry), (n_c - r, n_c, rw), fill)?;
    let p = Poly::new(coeffs).cleaned();
    let p = monomial_shift(&p, d as i64 - n as i64 + k as i64).map_err(as_conditioning)?;
    let p = zero_below(&p, floor);
    Ok(if r % 2 == 1 { p.scale(-1.0) } else { p })
}

fn radius_for(v: &Matrix, k: usize) -> f64 {
    if v.is_empty() {
        1.0
    } else {
        balanced_radius(v.clone().singular_values().as_slice(), k)
    }
}

/// Bivariate interpolation route.
pub fn expected_poly_bivariate(prob: &GcrssProblem) -> Result<Poly> {
    let (sp, s) = prob.normalized();
    let v = gram(&sp.b, Side::Left);
    let ac = stack_rows(&sp.a, &sp.c);
    let w = &ac * ac.transpose();
    let floor = structural_floor(sp.n(), sp.d(), sp.k, sp.r);
    let p = bivariate_from_cache(&v, &w, sp.n(), sp.n_c(), sp.d(), sp.k, sp.r, floor)?;
    Ok(unscale(&p, prob.d(), prob.k, prob.r, &s))
}

/// `(-1)^k x^{d-n+k} [y^k] det[x I_n - U - y V]` on normalized caches.
pub(crate) fn gcss_from_cache(
    u: &Matrix,
    v: &Matrix,
    n: usize,
    d: usize,
    k: usize,
    floor: usize,
) -> Result<Poly> {
    if k > n {
        return Ok(Poly::zero());
    }
    let fill = |x: Complex64, y: Complex64, _z: Complex64, buf: &mut [Complex64]| {
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = Complex64::new(-u[(i, j)], 0.0) - y * v[(i, j)];
            }
            buf[i * n + i] += x;
        }
    };
    let ry = radius_for(v, k);
    let coeffs = extract_xyw_scaled(n, n - k, (k, n, ry), (0, 0, 1.0), fill)?;
    let p = Poly::new(coeffs).cleaned();
    let p = zero_below(&monomial_shift(&p, d as i64 - n as i64 + k as i64)?, floor);
    Ok(if k % 2 == 1 { p.scale(-1.0) } else { p })
}

/// `P_k(x; A, B)` through the one-dimensional interpolation in `y`.
pub fn expected_poly_gcss(a: &Matrix, b: &Matrix, k: usize) -> Result<Poly> {
    let prob = GcrssProblem::gcss(a.clone(), b.clone(), k)?;
    let (sp, s) = prob.normalized();
    let u = gram(&sp.a, Side::Left);
    let v = gram(&sp.b, Side::Left);
    let p = gcss_from_cache(&u, &v, sp.n(), sp.d(), k, structural_floor(sp.n(), sp.d(), k, 0))?;
    Ok(unscale(&p, prob.d(), k, 0, &s))
}

/// `P_k(x; A, A)` via flip, differentiate, flip.
pub fn expected_poly_css(a: &Matrix, k: usize) -> Result<Poly> {
    check_finite(a, "A")?;
    let rank = numeric_rank(a, RANK_TOL);
    if k > rank {
        return invalid(format!("k = {k} exceeds rank(A) = {rank}"));
    }
    Ok(css_from_charpoly(&charpoly_gram(a), a.ncols(), k))
}

pub(crate) fn css_from_charpoly(charpoly: &Poly, d: usize, k: usize) -> Poly {
    let f = flip(charpoly, d).expect("charpoly degree is d");
    let g = derivative(&f, k);
    let h = flip(&g, d).expect("derivative lowers degree");
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    h.scale(sign / factorial(k)).cleaned()
}

fn complement(idx: &[usize], dim: usize) -> Vec<usize> {
    (0..dim).filter(|i| !idx.contains(i)).collect()
}

/// Identity-source form with partially selected rows `S` and columns `R` of `A`:
/// `x^k / ((k-|S|)! (r-|R|)!) d^{k-|S|} ( x^{r-|S|} d^{r-|R|} det[x I - M^T M] )`
/// with `M = A_{S^c, R^c}`.
pub fn expected_poly_identity(
    a: &Matrix,
    s: &[usize],
    r_set: &[usize],
    k: usize,
    r: usize,
) -> Result<Poly> {
    let d = a.nrows();
    if !a.is_square() {
        return invalid("identity-source route needs a square A");
    }
    check_finite(a, "A")?;
    if k > d || r > d || s.len() > k || r_set.len() > r {
        return invalid("subset sizes out of range");
    }
    if s.iter().chain(r_set).any(|&i| i >= d) {
        return invalid("index out of range");
    }
    let sub = a.select_rows(&complement(s, d)).select_columns(&complement(r_set, d));
    let t = derivative(&charpoly_gram(&sub), r - r_set.len());
    let t = monomial_shift(&t, r as i64 - s.len() as i64)?;
    let t = derivative(&t, k - s.len());
    let t = monomial_shift(&t, k as i64)?;
    Ok(t.scale(1.0 / (factorial(k - s.len()) * factorial(r - r_set.len()))).cleaned())
}

/// Block-determinant route through `H(x, y, z, 1)`.
pub fn expected_poly_h_determinant(prob: &GcrssProblem) -> Result<Poly> {
    let (n, d, db, nc) = (prob.n(), prob.d(), prob.d_b(), prob.n_c());
    let dim = n + nc + db + d;
    if dim > H_DETERMINANT_LIMIT {
        return Err(GcrssError::TooLarge(format!("block dimension {dim} exceeds {H_DETERMINANT_LIMIT}")));
    }
    let (sp, s) = prob.normalized();
    let (oz, oy, ox) = (n, n + nc, n + nc + db);
    let mut base = Matrix::zeros(dim, dim);
    for i in 0..n {
        base[(i, i)] = 1.0;
    }
    base.view_mut((0, oy), (n, db)).copy_from(&sp.b);
    base.view_mut((0, ox), (n, d)).copy_from(&sp.a);
    base.view_mut((oz, ox), (nc, d)).copy_from(&sp.c);
    base.view_mut((oy, 0), (db, n)).copy_from(&sp.b.transpose());
    base.view_mut((ox, 0), (d, n)).copy_from(&sp.a.transpose());
    base.view_mut((ox, oz), (d, nc)).copy_from(&sp.c.transpose());
    let fill = |x: Complex64, y: Complex64, z: Complex64, buf: &mut [Complex64]| {
        for i in 0..dim {
            for j in 0..dim {
                buf[i * dim + j] = Complex64::new(base[(i, j)], 0.0);
            }
        }
        for i in oz..oy {
            buf[i * dim + i] += z;
        }
        for i in oy..ox {
            buf[i * dim + i] += y;
        }
        for i in ox..dim {
            buf[i * dim + i] += x;
        }
    };
    let coeffs = extract_xyw(dim, d, db - prob.k, db, nc - prob.r, nc, fill)?;
    let p = monomial_shift(&Poly::new(coeffs).cleaned(), prob.r as i64)?;
    let p = zero_below(&p, structural_floor(n, d, prob.k, prob.r));
    let p = if (prob.k + prob.r) % 2 == 1 { p.scale(-1.0) } else { p };
    Ok(unscale(&p, d, prob.k, prob.r, &s))
}

/// Route chosen when none is requested.
pub fn default_path(prob: &GcrssProblem) -> PolyPath {
    if prob.sources_are_identity() {
        PolyPath::IdentityLaguerre
    } else if prob.r == 0 && prob.column_source_is_target() {
        PolyPath::CssFlip
    } else if prob.r == 0 {
        PolyPath::Gcss1d
    } else {
        PolyPath::BivariateGcrss
    }
}

/// `P_{k,r}` by the requested route, or the default one.
pub fn expected_poly(prob: &GcrssProblem, path: Option<PolyPath>) -> Result<Poly> {
    let path = path.unwrap_or_else(|| default_path(prob));
    if !path.applies_to(prob) {
        return match path {
            PolyPath::Definition | PolyPath::HDeterminant => {
                Err(GcrssError::TooLarge(format!("problem exceeds the {path} size guard")))
            }
            _ => Err(GcrssError::NotApplicable(format!("route {path} does not apply"))),
        };
    }
    match path {
        PolyPath::Definition => expected_poly_definition(prob),
        PolyPath::BivariateGcrss => expected_poly_bivariate(prob),
        PolyPath::Gcss1d => expected_poly_gcss(&prob.a, &prob.b, prob.k),
        PolyPath::CssFlip => expected_poly_css(&prob.a, prob.k),
        PolyPath::IdentityLaguerre => expected_poly_identity(&prob.a, &[], &[], prob.k, prob.r),
        PolyPath::HDeterminant => expected_poly_h_determinant(prob),
    }
}

/// Both sides of `P_{k,r}(A, B, C) = x^{d-n} P_{r,k}(A^T, C^T, B^T)`.
pub fn expected_poly_symmetry_pair(
    prob: &GcrssProblem,
    path: Option<PolyPath>,
) -> Result<(Poly, Poly)> {
    let left = expected_poly(prob, path)?;
    let right = expected_poly(&prob.transposed(), path)?;
    let right = monomial_shift(&right, prob.d() as i64 - prob.n() as i64)?;
    Ok((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecursionMode {
    Column,
    Row,
}

/// Problem conditioned on the partial selection `(S, R)`:
/// `(Q_S A P_R, Q_S B, C P_R)` with sizes `(k', r')`.
pub fn conditioned_problem(
    prob: &GcrssProblem,
    s: &[usize],
    r: &[usize],
    k: usize,
    rr: usize,
) -> Result<GcrssProblem> {
    let q = column_projector(&prob.b, s, RANK_TOL)?;
    let p = row_projector(&prob.c, r, RANK_TOL)?;
    Ok(GcrssProblem::unchecked(
        &q.mat * &prob.a * &p.mat,
        &q.mat * &prob.b,
        &prob.c * &p.mat,
        k,
        rr,
    ))
}

/// Both sides of the one-step recursion from the partial selection `(S, R)`,
/// computed on the definition route.
pub fn expected_poly_recursion_check(
    prob: &GcrssProblem,
    s: &[usize],
    r: &[usize],
    mode: RecursionMode,
) -> Result<(Poly, Poly)> {
    let (l, t) = (s.len(), r.len());
    if l > prob.k || t > prob.r {
        return invalid("partial selection larger than the target sizes");
    }
    let (kk, rr) = (prob.k - l, prob.r - t);
    let left = expected_poly_definition(&conditioned_problem(prob, s, r, kk, rr)?)?;
    let q = column_projector(&prob.b, s, RANK_TOL)?;
    let p = row_projector(&prob.c, r, RANK_TOL)?;
    let mut right = Poly::zero();
    match mode {
        RecursionMode::Column => {
            if kk == 0 {
                return invalid("column recursion needs |S| < k");
            }
            for i in 0..prob.d_b() {
                let bi = prob.b.column(i).into_owned();
                let w = (&q.mat * &bi).norm_squared();
                if w.sqrt() <= crate::linalg::degeneracy_threshold(bi.norm(), RANK_TOL) {
                    continue;
                }
                let mut si = s.to_vec();
                si.push(i);
                let term = expected_poly_definition(&conditioned_problem(prob, &si, r, kk - 1, rr)?)?;
                right = right.add(&term.scale(w));
            }
            right = right.scale(1.0 / kk as f64);
        }
        RecursionMode::Row => {
            if rr == 0 {
                return invalid("row recursion needs |R| < r");
            }
            for i in 0..prob.n_c() {
                let ci = prob.c.row(i).transpose();
                let w = (&p.mat * &ci).norm_squared();
                if w.sqrt() <= crate::linalg::degeneracy_threshold(ci.norm(), RANK_TOL) {
                    continue;
                }
                let mut ri = r.to_vec();
                ri.push(i);
                let term = expected_poly_definition(&conditioned_problem(prob, s, &ri, kk, rr - 1)?)?;
                right = right.add(&term.scale(w));
            }
            right = right.scale(1.0 / rr as f64);
        }
    }
    Ok((left, right))
}
