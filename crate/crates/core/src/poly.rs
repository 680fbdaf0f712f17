//! Real univariate polynomials stored with ascending coefficients.

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GcrssError, Result};

/// Relative threshold below which `trimmed` drops a leading coefficient.
pub const TRIM_TOL: f64 = 1e-12;
/// Relative threshold for zeroing coefficients after composite arithmetic.
pub const CLEANUP_TOL: f64 = 1e-13;
/// Relative threshold for the divisibility check of negative monomial shifts.
pub const DIVISIBILITY_TOL: f64 = 1e-9;
/// Relative threshold for terminating a Sturm chain.
pub const STURM_TAIL_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 400;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

fn max_abs(c: &[f64]) -> f64 {
    c.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, dropping trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1.0] }
    }

    /// `c * x^e`.
    pub fn monomial(c: f64, e: usize) -> Self {
        let mut v = vec![0.0; e + 1];
        v[e] = c;
        Poly::new(v)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Drops leading coefficients below `TRIM_TOL` relative to the largest one.
    /// Only meaningful for computed polynomials whose coefficients share a
    /// common scale; `from_roots` with spread-out roots is not one of them.
    pub fn trimmed(&self) -> Self {
        let m = self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|v| v.abs() <= TRIM_TOL * m) {
            c.pop();
        }
        Poly { coeffs: c }
    }

    /// Zeroes coefficients below `CLEANUP_TOL` relative to the largest one.
    pub fn cleaned(&self) -> Self {
        let m = self.max_abs_coeff();
        let c = self
            .coeffs
            .iter()
            .map(|&v| if v.abs() < CLEANUP_TOL * m { 0.0 } else { v })
            .collect();
        Poly::new(c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Poly::new(c).cleaned()
    }

    pub fn sub(&self, other: &Poly) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c).cleaned()
    }

    /// Rescales the variable: returns `q(x) = p(s x)`.
    pub fn compose_scale(&self, s: f64) -> Self {
        let mut f = 1.0;
        let c = self
            .coeffs
            .iter()
            .map(|&v| {
                let out = v * f;
                f *= s;
                out
            })
            .collect();
        Poly::new(c)
    }

    /// Max-coefficient distance relative to the larger of the two max-coefficient norms.
    pub fn rel_distance(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let diff = (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0_f64, f64::max);
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }
}

/// Exact `order`-th derivative.
pub fn derivative(p: &Poly, order: usize) -> Poly {
    if order == 0 {
        return p.clone();
    }
    let c = p.coeffs();
    if c.len() <= order {
        return Poly::zero();
    }
    let out = (order..c.len())
        .map(|i| {
            let falling: f64 = ((i - order + 1)..=i).map(|j| j as f64).product();
            c[i] * falling
        })
        .collect();
    Poly::new(out)
}

/// `x^d p(1/x)`.
pub fn flip(p: &Poly, d: usize) -> Result<Poly> {
    if let Some(deg) = p.degree() {
        if deg > d {
            return Err(GcrssError::InvalidInput(format!(
                "flip degree {d} is below polynomial degree {deg}"
            )));
        }
    }
    let mut c = vec![0.0; d + 1];
    for (i, &v) in p.coeffs().iter().enumerate() {
        c[d - i] = v;
    }
    Ok(Poly::new(c))
}

/// The Laguerre derivative `d/dx (x d/dx p)`.
pub fn laguerre_step(p: &Poly) -> Poly {
    // coefficient of x^{i-1} is i^2 c_i
    let c = p.coeffs();
    if c.len() <= 1 {
        return Poly::zero();
    }
    Poly::new((1..c.len()).map(|i| (i * i) as f64 * c[i]).collect())
}

/// Multiplies by `x^e`; negative `e` requires the trailing coefficients to vanish.
pub fn monomial_shift(p: &Poly, e: i64) -> Result<Poly> {
    if p.is_zero() {
        return Ok(Poly::zero());
    }
    if e >= 0 {
        let mut c = vec![0.0; e as usize];
        c.extend_from_slice(p.coeffs());
        return Ok(Poly::new(c));
    }
    let drop = (-e) as usize;
    let m = p.max_abs_coeff();
    let c = p.coeffs();
    for (i, v) in c.iter().take(drop).enumerate() {
        if v.abs() > DIVISIBILITY_TOL * m {
            return Err(GcrssError::Divisibility(format!(
                "coefficient of x^{i} is {v:e}, expected a factor x^{drop}"
            )));
        }
    }
    if c.len() <= drop {
        return Ok(Poly::zero());
    }
    Ok(Poly::new(c[drop..].to_vec()))
}

/// Bracket around the largest real root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub eta: f64,
}

impl RootBracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Normalized Sturm chain of a polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Vec<f64>>,
    /// Power of two with `x = sigma t`; the chain is built in `t`.
    sigma: f64,
}

/// Power of two near the Fujiwara bound on the root moduli, so that the
/// substituted polynomial has its roots within a modest factor of the unit disk.
fn root_scale(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    if n == 0 {
        return 1.0;
    }
    let lead = c[n].abs();
    let b = (1..=n)
        .map(|i| (c[n - i].abs() / lead).powf(1.0 / i as f64))
        .fold(0.0_f64, f64::max);
    if b > 0.0 && b.is_finite() {
        2f64.powi(b.log2().round() as i32)
    } else {
        1.0
    }
}

fn normalize(mut c: Vec<f64>) -> Vec<f64> {
    let m = max_abs(&c);
    if m > 0.0 {
        c.iter_mut().for_each(|v| *v /= m);
    }
    c
}

/// Drops leading coefficients at or below `tol`; the result is empty when
/// every coefficient is.
fn trim_leading(mut c: Vec<f64>, tol: f64) -> Vec<f64> {
    while c.last().is_some_and(|v| v.abs() <= tol) {
        c.pop();
    }
    c
}

/// Remainder of `a / b` (both nonzero, ascending coefficients), with the
/// largest magnitude met while subtracting.
fn poly_rem(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut r = a.to_vec();
    let mut scale = max_abs(a);
    let db = b.len() - 1;
    let lead = b[db];
    let bmax = max_abs(b);
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let q = r[top] / lead;
        scale = scale.max(q.abs() * bmax);
        let shift = top - db;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] -= q * bj;
        }
        r.pop();
    }
    (r, scale)
}

impl SturmChain {
    pub fn new(p: &Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(GcrssError::InvalidInput("Sturm chain of the zero polynomial".into()));
        }
        if !p.is_finite() {
            return Err(GcrssError::Conditioning("non-finite coefficients".into()));
        }
        let sigma = root_scale(p.coeffs());
        let pt = Poly::new(
            p.coeffs().iter().enumerate().map(|(i, c)| c * sigma.powi(i as i32)).collect(),
        );
        if !pt.is_finite() {
            return Err(GcrssError::Conditioning("root scaling overflow".into()));
        }
        let mut chain = vec![normalize(pt.coeffs().to_vec())];
        let dp = derivative(&pt, 1);
        if !dp.is_zero() {
            chain.push(normalize(dp.coeffs().to_vec()));
        }
        // A remainder that came out of heavy cancellation carries its rounding
        // noise magnified by the same factor once normalized, so the tail test
        // for the next remainder is relative to that factor.
        let mut step = 1.0_f64;
        while chain.len() >= 2 {
            let n = chain.len();
            let b = &chain[n - 1];
            if b.len() <= 1 {
                break;
            }
            let (r, scale) = poly_rem(&chain[n - 2], b);
            let floor = STURM_TAIL_TOL * step * scale;
            let r = trim_leading(r.into_iter().map(|v| -v).collect(), floor);
            if r.is_empty() {
                break;
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(GcrssError::Conditioning("Sturm chain breakdown".into()));
            }
            step = scale / max_abs(&r);
            chain.push(normalize(r));
        }
        Ok(SturmChain { chain, sigma })
    }

    fn eval(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
    }

    /// Sign variations of the chain at `x`, zeros skipped.
    pub fn variations(&self, x: f64) -> Result<usize> {
        let mut count = 0;
        let mut last = 0.0_f64;
        for c in &self.chain {
            let v = Self::eval(c, x / self.sigma);
            if !v.is_finite() {
                return Err(GcrssError::Conditioning("sign sequence overflow".into()));
            }
            if v != 0.0 {
                if last != 0.0 && (v > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = v;
            }
        }
        Ok(count)
    }

    /// Distinct roots in `(a, b]`.
    pub fn count(&self, a: f64, b: f64) -> Result<usize> {
        let va = self.variations(a)?;
        let vb = self.variations(b)?;
        va.checked_sub(vb)
            .ok_or_else(|| GcrssError::Conditioning("non-monotone Sturm variations".into()))
    }
}

/// Number of distinct real roots of `p` in `(a, b]`.
pub fn sturm_count(p: &Poly, a: f64, b: f64) -> Result<usize> {
    if !(a < b) {
        return Err(GcrssError::InvalidInput(format!("empty interval ({a}, {b}]")));
    }
    let chain = SturmChain::new(p)?;
    let nudge = |x: f64| x + 1e-12 * (1.0 + x.abs());
    let a = if p.eval(a) == 0.0 { nudge(a) } else { a };
    let b = if p.eval(b) == 0.0 { nudge(b) } else { b };
    chain.count(a, b)
}

/// Cauchy bound on the moduli of the roots.
pub fn cauchy_bound(p: &Poly) -> f64 {
    let c = p.coeffs();
    let lead = p.leading().abs();
    1.0 + c[..c.len().saturating_sub(1)]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs() / lead))
}

/// Bracket of width at most `2 eta` around the largest real root, by Sturm bisection.
pub fn maxroot_eta(p: &Poly, eta: f64) -> Result<RootBracket> {
    if p.is_zero() {
        return Err(GcrssError::InvalidInput("largest root of the zero polynomial".into()));
    }
    if !(eta > 0.0) {
        return Err(GcrssError::InvalidInput(format!("eta must be positive, got {eta}")));
    }
    if p.degree() == Some(0) {
        return Err(GcrssError::InvalidInput("constant polynomial has no roots".into()));
    }
    let chain = SturmChain::new(p)?;
    let mut hi = cauchy_bound(p);
    let mut lo = -hi;
    if !hi.is_finite() {
        return Err(GcrssError::Conditioning("root bound overflow".into()));
    }
    if chain.count(lo, hi)? == 0 {
        return Err(GcrssError::Conditioning("no real root found".into()));
    }
    let vhi = chain.variations(hi)?;
    let mut iters = 0;
    while hi - lo > 2.0 * eta {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iters >= MAX_BISECTIONS {
            break;
        }
        // A root at `mid` itself also bounds the largest root from below.
        if p.eval(mid) == 0.0 || chain.variations(mid)? > vhi {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    Ok(RootBracket { lo, hi, eta })
}

/// Largest real root, the midpoint of `maxroot_eta`.
pub fn maxroot(p: &Poly, eta: f64) -> Result<f64> {
    maxroot_eta(p, eta).map(|b| b.mid())
}

/// Roots via eigenvalues of the balanced companion matrix. Exact zero
/// roots are split off first.
pub fn companion_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let Some(deg) = p.degree() else {
        return Ok(Vec::new());
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let c = p.coeffs();
    let zeros = c.iter().take_while(|v| **v == 0.0).count();
    let c = &c[zeros..];
    let deg = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if deg == 0 {
        return Ok(roots);
    }
    let lead = c[deg];
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    balance_parlett_reinsch(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| GcrssError::Conditioning("companion eigenvalues did not converge".into()))?;
    roots.extend(schur.complex_eigenvalues().iter().copied());
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_poly(p: &Poly, want: &[f64]) {
        assert!(p.rel_distance(&Poly::new(want.to_vec())) < 1e-12, "{p:?} vs {want:?}");
    }

    #[test]
    fn derivative_examples() {
        assert_poly(&derivative(&Poly::new(vec![-1.0, 0.0, 1.0]), 1), &[0.0, 2.0]);
        assert!(derivative(&Poly::new(vec![1.0, 2.0, 3.0]), 3).is_zero());
        assert_poly(&derivative(&Poly::monomial(1.0, 4), 2), &[0.0, 0.0, 12.0]);
    }

    #[test]
    fn flip_examples() {
        assert_poly(&flip(&Poly::new(vec![3.0, -2.0, 1.0]), 2).unwrap(), &[1.0, -2.0, 3.0]);
        assert_poly(&flip(&Poly::one(), 3).unwrap(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            flip(&Poly::monomial(1.0, 3), 2),
            Err(GcrssError::InvalidInput(_))
        ));
    }

    #[test]
    fn laguerre_examples() {
        assert_poly(&laguerre_step(&Poly::new(vec![1.0, -2.0, 1.0])), &[-2.0, 4.0]);
        assert_poly(&laguerre_step(&Poly::monomial(1.0, 5)), &[0.0, 0.0, 0.0, 0.0, 25.0]);
        assert!(laguerre_step(&Poly::new(vec![7.0])).is_zero());
    }

    #[test]
    fn monomial_shift_examples() {
        assert_poly(&monomial_shift(&Poly::new(vec![1.0, 2.0]), 2).unwrap(), &[0.0, 0.0, 1.0, 2.0]);
        assert_poly(&monomial_shift(&Poly::new(vec![0.0, 1.0, 1.0]), -1).unwrap(), &[1.0, 1.0]);
        assert!(matches!(
            monomial_shift(&Poly::new(vec![1.0, 0.0, 1.0]), -1),
            Err(GcrssError::Divisibility(_))
        ));
    }

    #[test]
    fn maxroot_examples() {
        let b = maxroot_eta(&Poly::new(vec![0.0, 1.0]), 1e-6).unwrap();
        assert!(b.lo <= 0.0 && 0.0 <= b.hi && b.hi - b.lo <= 2e-6);
        let b = maxroot_eta(&Poly::new(vec![-1.0, 0.0, 1.0]), 1e-6).unwrap();
        assert!((b.mid() - 1.0).abs() <= 1e-6);
        let b = maxroot_eta(&Poly::new(vec![0.0, -2.0, 4.0]), 1e-6).unwrap();
        assert!((b.mid() - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn maxroot_pure_monomial_is_zero() {
        let b = maxroot_eta(&Poly::monomial(3.0, 4), 1e-8).unwrap();
        assert!(b.mid().abs() <= 1e-8);
    }

    #[test]
    fn maxroot_rejects_zero() {
        assert!(matches!(maxroot_eta(&Poly::zero(), 1e-6), Err(GcrssError::InvalidInput(_))));
    }

    #[test]
    fn sturm_examples() {
        let p = Poly::new(vec![-1.0, 0.0, 1.0]);
        assert_eq!(sturm_count(&p, 0.0, 2.0).unwrap(), 1);
        assert_eq!(sturm_count(&p, -2.0, 2.0).unwrap(), 2);
        let q = Poly::from_roots(&[1.0, 1.0, 3.0]);
        assert_eq!(sturm_count(&q, 0.0, 4.0).unwrap(), 2);
    }

    #[test]
    fn maxroot_with_zero_roots() {
        let p = Poly::from_roots(&[0.0, 0.0, 0.3, 2.5]);
        assert!((maxroot(&p, 1e-10).unwrap() - 2.5).abs() <= 1e-9);
    }

    #[test]
    fn maxroot_multiple_top_root() {
        // A triple root is only resolvable to about the cube root of machine epsilon.
        let p = Poly::from_roots(&[1.0, 1.0, 1.0, 0.2]);
        assert!((maxroot(&p, 1e-9).unwrap() - 1.0).abs() <= 1e-4);
        let q = Poly::from_roots(&[0.5, 0.5, 0.1]);
        assert!((maxroot(&q, 1e-12).unwrap() - 0.5).abs() <= 1e-7);
    }
}
