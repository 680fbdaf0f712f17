//! Greedy interlacing-polynomial selection and closed-form bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GcrssError, Result};
use crate::expected::{
    bivariate_from_cache, css_from_charpoly, default_path, expected_poly, expected_poly_identity,
    gcss_from_cache, structural_floor, zero_below, GcrssProblem, PolyPath,
};
use crate::linalg::{
    charpoly_gram, frobenius_norm_sq, numeric_rank, projector_rank_one_downdate,
    projector_rank_one_downdate_row, residual_matrix, spectral_norm, Matrix, RowState,
    SubsetState, RANK_TOL,
};
use crate::oracle::left_singular_basis;
use crate::poly::{maxroot_eta, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Accuracy of each largest-root approximation, in the units of `||A||^2`.
    pub eta: f64,
    /// Relative threshold below which a projected direction counts as zero.
    pub tol: f64,
    pub path_override: Option<PolyPath>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { eta: 1e-6, tol: RANK_TOL, path_override: None }
    }
}

impl SelectionConfig {
    pub fn with_eta(eta: f64) -> Self {
        SelectionConfig { eta, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return invalid(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return invalid(format!("tol must lie in (0, 1e-3), got {}", self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Column,
    Row,
}

/// One greedy iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub phase: Phase,
    pub candidate_count: usize,
    pub chosen: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub s: Vec<usize>,
    pub r: Vec<usize>,
    pub residual_spectral_sq: f64,
    pub residual_frobenius_sq: f64,
    pub maxroot_bound: f64,
    pub path: PolyPath,
    pub trace: Vec<TraceRecord>,
}

impl SelectionResult {
    pub fn s_sorted(&self) -> Vec<usize> {
        sorted(&self.s)
    }
    pub fn r_sorted(&self) -> Vec<usize> {
        sorted(&self.r)
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Partial selection seen by a candidate evaluation, in normalized units.
struct Candidate<'a> {
    /// Coefficients below this index vanish structurally.
    floor: usize,
    q: &'a Matrix,
    p: &'a Matrix,
    s: &'a [usize],
    r: &'a [usize],
    v: &'a Matrix,
    w: &'a Matrix,
}

struct Engine {
    prob: GcrssProblem,
    norm: GcrssProblem,
    a2: f64,
    path: PolyPath,
    eta: f64,
    tol: f64,
}

impl Engine {
    fn new(prob: &GcrssProblem, cfg: &SelectionConfig) -> Result<Self> {
        cfg.validate()?;
        let path = cfg.path_override.unwrap_or_else(|| default_path(prob));
        if !path.applies_to(prob) {
            return Err(GcrssError::NotApplicable(format!("route {path} does not apply to this problem")));
        }
        let (norm, scale) = prob.normalized();
        let a2 = scale.a * scale.a;
        Ok(Engine { prob: prob.clone(), norm, a2, path, eta: cfg.eta / a2, tol: cfg.tol })
    }

    /// `P_{kk,rr}` of the problem conditioned on the candidate's selection.
    fn poly(&self, c: &Candidate, kk: usize, rr: usize) -> Result<Poly> {
        let np = &self.norm;
        match self.path {
            PolyPath::BivariateGcrss => {
                bivariate_from_cache(c.v, c.w, np.n(), np.n_c(), np.d(), kk, rr, c.floor)
            }
            PolyPath::Gcss1d => {
                let n = np.n();
                let u = c.w.view((0, 0), (n, n)).into_owned();
                gcss_from_cache(&u, c.v, n, np.d(), kk, c.floor)
            }
            PolyPath::CssFlip => {
                let qa = c.q * &np.a;
                Ok(zero_below(&css_from_charpoly(&charpoly_gram(&qa), np.d(), kk), c.floor))
            }
            PolyPath::IdentityLaguerre => expected_poly_identity(&np.a, c.s, c.r, np.k, np.r),
            PolyPath::Definition | PolyPath::HDeterminant => {
                let sub = GcrssProblem::new(
                    c.q * &np.a * c.p,
                    c.q * &np.b,
                    &np.c * c.p,
                    kk,
                    rr,
                )?;
                expected_poly(&sub, Some(self.path))
            }
        }
    }

    fn lambda(&self, p: &Poly) -> Result<Option<f64>> {
        if p.is_zero() {
            return Ok(None);
        }
        Ok(Some(maxroot_eta(p, self.eta)?.mid()))
    }

    fn run(&self) -> Result<SelectionResult> {
        let np = &self.norm;
        let (k, r, d) = (np.k, np.r, np.d());
        let mut col = SubsetState::initial(&np.a, &np.b, &np.c, self.tol);
        let ident_d = Matrix::identity(d, d);
        let start = Candidate {
            floor: structural_floor(np.n(), d, k, r),
            q: &col.projector.mat,
            p: &ident_d,
            s: &[],
            r: &[],
            v: &col.v,
            w: &col.w,
        };
        let bound_poly = self.poly(&start, k, r)?;
        let maxroot_bound = self
            .lambda(&bound_poly)?
            .ok_or_else(|| GcrssError::RankDeficiency("expected polynomial vanishes".into()))?
            * self.a2;
        let mut trace = Vec::with_capacity(k + r);

        for l in 1..=k {
            let kk = k - l;
            let candidates: Vec<usize> =
                (0..np.d_b()).filter(|i| !col.subset.contains(i)).collect();
            let evals = candidates
                .par_iter()
                .map(|&i| {
                    let bi = np.b.column(i).into_owned();
                    let st = match projector_rank_one_downdate(&col, i, &bi, self.tol) {
                        Ok(st) => st,
                        Err(GcrssError::DegenerateDirection(_)) => return Ok(None),
                        Err(e) => return Err(e),
                    };
                    let cand = Candidate {
                        floor: structural_floor(np.n(), d, k, r),
                        q: &st.projector.mat,
                        p: &ident_d,
                        s: &st.subset,
                        r: &[],
                        v: &st.v,
                        w: &st.w,
                    };
                    let lam = self.lambda(&self.poly(&cand, kk, r)?)?;
                    Ok(lam.map(|lam| (i, lam, st)))
                })
                .collect::<Result<Vec<_>>>()?;
            let admissible = evals.iter().flatten().count();
            let (chosen, lam, st) = argmin(evals, 2.0 * self.eta).ok_or_else(|| {
                GcrssError::RankDeficiency(format!("no admissible column at iteration {l}"))
            })?;
            trace.push(TraceRecord {
                iteration: l,
                phase: Phase::Column,
                candidate_count: admissible,
                chosen,
                lambda: lam * self.a2,
            });
            col = st;
        }

        let mut row = RowState::initial(&np.a, &np.c, &col.projector, self.tol);
        let mut w = col.w.clone();
        for l in 1..=r {
            let rr = r - l;
            let candidates: Vec<usize> =
                (0..np.n_c()).filter(|i| !row.subset.contains(i)).collect();
            let evals = candidates
                .par_iter()
                .map(|&i| {
                    let ci = np.c.row(i).transpose();
                    let (st, w2) = match projector_rank_one_downdate_row(&row, &w, i, &ci, self.tol) {
                        Ok(v) => v,
                        Err(GcrssError::DegenerateDirection(_)) => return Ok(None),
                        Err(e) => return Err(e),
                    };
                    let cand = Candidate {
                        floor: structural_floor(np.n(), d, k, r),
                        q: &col.projector.mat,
                        p: &st.projector.mat,
                        s: &col.subset,
                        r: &st.subset,
                        v: &col.v,
                        w: &w2,
                    };
                    let lam = self.lambda(&self.poly(&cand, 0, rr)?)?;
                    Ok(lam.map(|lam| (i, lam, (st, w2))))
                })
                .collect::<Result<Vec<_>>>()?;
            let admissible = evals.iter().flatten().count();
            let (chosen, lam, (st, w2)) = argmin(evals, 2.0 * self.eta).ok_or_else(|| {
                GcrssError::RankDeficiency(format!("no admissible row at iteration {l}"))
            })?;
            trace.push(TraceRecord {
                iteration: k + l,
                phase: Phase::Row,
                candidate_count: admissible,
                chosen,
                lambda: lam * self.a2,
            });
            row = st;
            w = w2;
        }

        let resid = residual_matrix(&self.prob, &col.subset, &row.subset)?;
        let norm = spectral_norm(&resid);
        Ok(SelectionResult {
            s: col.subset,
            r: row.subset,
            residual_spectral_sq: norm * norm,
            residual_frobenius_sq: frobenius_norm_sq(&resid),
            maxroot_bound,
            path: self.path,
            trace,
        })
    }
}

/// Smallest value; the first (smallest index) wins ties.
/// Smallest index whose value is within `tie` of the minimum. Brackets of
/// width `2 eta` cannot order values closer than that, and rounding in the
/// inputs would otherwise decide such near-ties.
fn argmin<T>(evals: Vec<Option<(usize, f64, T)>>, tie: f64) -> Option<(usize, f64, T)> {
    let evals: Vec<_> = evals.into_iter().flatten().collect();
    let min = evals.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    evals.into_iter().find(|e| e.1 <= min + tie)
}

/// Greedy selection of `k` columns of `B`, then `r` rows of `C`.
pub fn select_gcrss(prob: &GcrssProblem, cfg: &SelectionConfig) -> Result<SelectionResult> {
    Engine::new(prob, cfg)?.run()
}

/// Column-only selection (`r = 0`).
pub fn select_gcss(a: &Matrix, b: &Matrix, k: usize, cfg: &SelectionConfig) -> Result<SelectionResult> {
    select_gcrss(&GcrssProblem::gcss(a.clone(), b.clone(), k)?, cfg)
}

/// Classical column subset selection (`B = A`).
pub fn select_css(a: &Matrix, k: usize, cfg: &SelectionConfig) -> Result<SelectionResult> {
    select_gcss(a, a, k, cfg)
}

/// Submatrix selection result. `rows` and `cols` index the `k x r` block
/// `A[rows, cols]`; `internal` holds the complementary sets picked by the
/// greedy run over identity sources.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmatrixResult {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub spectral_norm: f64,
    pub internal: SelectionResult,
}

/// Picks `k` rows and `r` columns of a square `A` with small `||A[rows, cols]||_2`.
pub fn select_submatrix(a: &Matrix, k: usize, r: usize, cfg: &SelectionConfig) -> Result<SubmatrixResult> {
    if !a.is_square() || a.is_empty() {
        return invalid("submatrix selection needs a nonempty square matrix");
    }
    let d = a.nrows();
    if k > d || r > d {
        return invalid(format!("sizes k = {k}, r = {r} exceed dimension {d}"));
    }
    let eye = Matrix::identity(d, d);
    let prob = GcrssProblem::new(a.clone(), eye.clone(), eye, d - k, d - r)?;
    let internal = select_gcrss(&prob, cfg)?;
    let rows: Vec<usize> = (0..d).filter(|i| !internal.s.contains(i)).collect();
    let cols: Vec<usize> = (0..d).filter(|i| !internal.r.contains(i)).collect();
    let block = a.select_rows(&rows).select_columns(&cols);
    Ok(SubmatrixResult { rows, cols, spectral_norm: spectral_norm(&block), internal })
}

/// Scalar ingredients and resulting bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub delta_k: f64,
    pub t: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub beta: f64,
    /// Rank of the column source.
    pub m: usize,
    /// Spectral norm of `A`.
    pub scale: f64,
    /// Bound on the squared residual norm.
    pub bound_thm13: Option<f64>,
    /// Looser bound on the squared residual norm.
    pub bound_relaxed: Option<f64>,
    /// Bound on the spectral norm of the selected submatrix.
    pub bound_thm15: Option<f64>,
    /// Comparison bound on the squared residual norm for identity sources.
    pub bound_ravichandran: Option<f64>,
    pub condition_thm13: bool,
    pub condition_thm15: bool,
}

/// Elementary symmetric polynomial `e_k` by the incremental product recurrence.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &b in values {
        for j in (1..=k).rev() {
            e[j] += b * e[j - 1];
        }
    }
    e[k]
}

/// `e_k(b_1..b_{m-1}) / e_k(b_1..b_m)` for `b` sorted descending.
pub fn delta_k(b: &[f64], k: usize) -> f64 {
    let m = b.len();
    elementary_symmetric(&b[..m - 1], k) / elementary_symmetric(b, k)
}

/// `(sqrt(alpha t) + sqrt((1 - alpha)(1 - t)))^2` with `t = (1 - sqrt(delta))^2`.
pub fn epsilon_from(alpha: f64, delta: f64) -> (f64, f64) {
    let t = (1.0 - delta.max(0.0).sqrt()).powi(2);
    let eps = ((alpha * t).max(0.0).sqrt() + ((1.0 - alpha) * (1.0 - t)).max(0.0).sqrt()).powi(2);
    (t, eps)
}

fn ravichandran(beta: f64, frac: f64) -> f64 {
    ((frac * beta).max(0.0).sqrt() + ((1.0 - beta) * (1.0 - frac)).max(0.0).sqrt()).powi(2)
}

/// Largest diagonal entry of `M` over `||M||_2`, zero for `M = 0`.
fn diag_ratio(m: &Matrix) -> f64 {
    let nrm = spectral_norm(m);
    if nrm == 0.0 {
        return 0.0;
    }
    m.diagonal().max() / nrm
}

/// Column-selection bounds for `A` with source `B`.
pub fn bound_gcss(a: &Matrix, b: &Matrix, k: usize) -> Result<BoundReport> {
    let prob = GcrssProblem::gcss(a.clone(), b.clone(), 0)?;
    let m = numeric_rank(&prob.b, RANK_TOL);
    if m < 2 {
        return invalid(format!("rank(B) = {m}, need at least 2"));
    }
    if k < 1 || k >= m {
        return invalid(format!("k = {k} must lie in [1, {}]", m - 1));
    }
    let (u, bvals) = left_singular_basis(b, m);
    let ua = u.tr_mul(a);
    let alpha = diag_ratio(&(&ua * ua.transpose()));
    let delta = delta_k(&bvals, k);
    let (t, epsilon) = epsilon_from(alpha, delta);
    let kappa = (bvals[0] / bvals[m - 1]).sqrt();
    let head = &u * &ua;
    let floor = spectral_norm(&(a - &head)).powi(2);
    let head_sq = spectral_norm(&head).powi(2);
    let scale = spectral_norm(a);
    let n = a.nrows();
    let beta = if scale > 0.0 { a.norm_squared() / (n as f64 * scale * scale) } else { 0.0 };
    let frac = k as f64 / m as f64;
    let relaxed = floor + (alpha + 4.0 * kappa.sqrt() * (1.0 - frac).powf(0.25)) * head_sq;
    let bound_ravichandran = crate::expected::is_identity(b)
        .then(|| scale * scale * ravichandran(beta, k as f64 / n as f64));
    Ok(BoundReport {
        alpha,
        delta_k: delta,
        t,
        epsilon,
        kappa,
        beta,
        m,
        scale,
        bound_thm13: Some(floor + epsilon * head_sq),
        bound_relaxed: Some(relaxed),
        bound_thm15: None,
        bound_ravichandran,
        condition_thm13: delta <= (1.0 - alpha.sqrt()).powi(2),
        condition_thm15: false,
    })
}

/// `(1 - beta) k/d + 2 sqrt((1 - k/d)(k/d) beta)`.
pub fn submatrix_bound_value(beta: f64, k: usize, d: usize) -> f64 {
    let f = k as f64 / d as f64;
    (1.0 - beta) * f + 2.0 * ((1.0 - f) * f * beta).max(0.0).sqrt()
}

/// Bound on `||A[rows, cols]||_2` for `k x k` submatrices of a square `A`.
/// Matrices with `||A||_2 > 1` are rescaled and the bound scaled back.
pub fn bound_submatrix(a: &Matrix, k: usize) -> Result<BoundReport> {
    if !a.is_square() || a.is_empty() {
        return invalid("submatrix bound needs a nonempty square matrix");
    }
    crate::linalg::check_finite(a, "A")?;
    let d = a.nrows();
    if k > d {
        return invalid(format!("k = {k} exceeds dimension {d}"));
    }
    let scale = spectral_norm(a);
    let s = if scale > 1.0 { scale } else { 1.0 };
    let ah = a / s;
    let beta = ah.norm_squared() / d as f64;
    let alpha = diag_ratio(&(&ah * ah.transpose()));
    let delta = 1.0 - k as f64 / d as f64;
    let (t, epsilon) = epsilon_from(alpha, delta);
    Ok(BoundReport {
        alpha,
        delta_k: delta,
        t,
        epsilon,
        kappa: 1.0,
        beta,
        m: d,
        scale,
        bound_thm13: None,
        bound_relaxed: None,
        bound_thm15: Some(s * submatrix_bound_value(beta, k, d)),
        bound_ravichandran: None,
        condition_thm13: false,
        condition_thm15: (k as f64) < d as f64 / (beta + 1.0),
    })
}

/// Closed-form estimate of the largest root of `(d x d)^k p` for `p` of
/// degree `d` with roots in `[0, 1]`.
pub fn laguerre_maxroot_bound(p: &Poly, k: usize, d: usize) -> Result<f64> {
    if p.degree() != Some(d) || d == 0 {
        return invalid(format!("polynomial degree {:?} differs from d = {d}", p.degree()));
    }
    if k > d {
        return invalid(format!("k = {k} exceeds d = {d}"));
    }
    let beta = -p.coeff(d - 1) / (d as f64 * p.leading());
    if !((k as f64) > beta * d as f64 / (beta + 1.0)) {
        return Err(GcrssError::NotApplicable(format!(
            "k = {k} does not exceed beta d / (beta + 1) with beta = {beta}"
        )));
    }
    let f = k as f64 / d as f64;
    Ok(((1.0 - beta) * (1.0 - f) + 2.0 * ((1.0 - f) * f * beta).max(0.0).sqrt()).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn eye(n: usize) -> Matrix {
        Matrix::identity(n, n)
    }

    #[test]
    fn config_validation() {
        assert!(SelectionConfig::default().validate().is_ok());
        assert!(SelectionConfig::with_eta(0.0).validate().is_err());
        let bad = SelectionConfig { tol: 1e-2, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_selection_returns_norm() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let prob = GcrssProblem::new(a.clone(), eye(2), eye(2), 0, 0).unwrap();
        let res = select_gcrss(&prob, &SelectionConfig::default()).unwrap();
        assert!(res.s.is_empty() && res.r.is_empty());
        assert!((res.residual_spectral_sq - spectral_norm(&a).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn micro_example() {
        let prob = GcrssProblem::new(eye(2), eye(2), eye(2), 1, 1).unwrap();
        let res = select_gcrss(&prob, &SelectionConfig::with_eta(1e-8)).unwrap();
        assert!(res.residual_spectral_sq.abs() < 1e-10);
        assert!((res.maxroot_bound - 0.5).abs() < 1e-8);
    }

    #[test]
    fn gcss_example() {
        let a = Matrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let res = select_gcss(&a, &eye(2), 1, &SelectionConfig::default()).unwrap();
        assert_eq!(res.s, vec![1]);
        assert!((res.residual_spectral_sq - 1.0).abs() < 1e-12);
        assert!((res.maxroot_bound - 2.5).abs() < 1e-6);
    }

    #[test]
    fn css_full_rank_annihilates() {
        let a = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.3, 0.2, -0.7]);
        let res = select_css(&a, 3, &SelectionConfig::default()).unwrap();
        assert_eq!(res.path, PolyPath::CssFlip);
        assert!(res.residual_spectral_sq < 1e-20);
    }

    #[test]
    fn zero_target_has_zero_residual() {
        let b = Matrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0]);
        let res = select_gcss(&Matrix::zeros(2, 2), &b, 2, &SelectionConfig::default()).unwrap();
        assert_eq!(res.residual_spectral_sq, 0.0);
    }

    #[test]
    fn submatrix_identity() {
        let res = select_submatrix(&eye(2), 1, 1, &SelectionConfig::with_eta(1e-10)).unwrap();
        assert!(res.spectral_norm < 1e-12);
        assert_ne!(res.rows, res.cols);
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let full = select_submatrix(&a, 2, 2, &SelectionConfig::default()).unwrap();
        assert!((full.spectral_norm - spectral_norm(&a)).abs() < 1e-12);
    }

    #[test]
    fn bound_equal_singular_values() {
        let b = eye(4) * 3.0;
        let a = Matrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.5, 0.0]);
        let rep = bound_gcss(&a, &b, 1).unwrap();
        assert!((rep.delta_k - 0.75).abs() < 1e-12);
        assert!((rep.kappa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_css_condition_fails() {
        let a = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.3, 0.2, -0.7]);
        let rep = bound_gcss(&a, &a, 1).unwrap();
        assert!((rep.alpha - 1.0).abs() < 1e-9);
        assert!(!rep.condition_thm13);
    }

    #[test]
    fn epsilon_limit() {
        let (_, eps) = epsilon_from(0.3, 0.0);
        assert!((eps - 0.3).abs() < 1e-12);
    }

    #[test]
    fn bound_submatrix_examples() {
        let rep = bound_submatrix(&Matrix::zeros(4, 4), 1).unwrap();
        assert_eq!(rep.beta, 0.0);
        assert!((rep.bound_thm15.unwrap() - 0.25).abs() < 1e-15);
        assert!((submatrix_bound_value(0.25, 1, 4) - 0.6205).abs() < 5e-4);
        let rep = bound_submatrix(&eye(4), 2).unwrap();
        assert!(!rep.condition_thm15);
        assert!(bound_submatrix(&eye(4), 1).unwrap().condition_thm15);
    }

    #[test]
    fn laguerre_bound_examples() {
        let d = 4;
        let p = Poly::monomial(1.0, d);
        let b = laguerre_maxroot_bound(&p, 1, d).unwrap();
        assert!((b - 0.5625).abs() < 1e-15);
        let q = Poly::from_roots(&[1.0; 4]);
        assert!(laguerre_maxroot_bound(&q, 2, d).is_err());
        let b = laguerre_maxroot_bound(&q, 3, d).unwrap();
        assert!((b - 4.0 * 0.25 * 0.75).abs() < 1e-12);
    }
}
