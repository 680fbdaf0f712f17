//! Coefficient extraction from determinant evaluations at roots of unity.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{GcrssError, Result};

/// Relative bound on the imaginary residue of interpolated coefficients.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Determinant of a dense complex matrix (row-major, overwritten) by LU with
/// partial pivoting.
pub fn det_lu(a: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let mut piv = j;
        let mut best = a[j * n + j].norm_sqr();
        for i in (j + 1)..n {
            let v = a[i * n + j].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != j {
            for c in 0..n {
                a.swap(j * n + c, piv * n + c);
            }
            det = -det;
        }
        let d = a[j * n + j];
        det *= d;
        let inv = 1.0 / d;
        for i in (j + 1)..n {
            let f = a[i * n + j] * inv;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for c in (j + 1)..n {
                let t = a[j * n + c];
                a[i * n + c] -= f * t;
            }
        }
    }
    det
}

/// Product of row norms, an upper bound on `|det|` that sets the rounding floor.
fn hadamard_bound(a: &[Complex64], n: usize) -> f64 {
    (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// Sample points for one variable: a single zero node when only the constant
/// coefficient is needed, otherwise `degree + 1` roots of unity.
#[derive(Debug, Clone)]
pub struct Nodes {
    pub points: Vec<Complex64>,
    power: usize,
}

impl Nodes {
    /// Nodes on the circle of the given radius.
    pub fn with_radius(power: usize, degree: usize, radius: f64) -> Self {
        if power == 0 {
            return Nodes { points: vec![Complex64::new(0.0, 0.0)], power };
        }
        let n = degree + 1;
        let points = (0..n)
            .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64))
            .collect();
        Nodes { points, power }
    }

    /// Weight of node `j` when extracting the coefficient of `t^power`.
    pub fn weight(&self, j: usize) -> Complex64 {
        if self.power == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let n = self.points.len() as f64;
        self.points[j].powi(-(self.power as i32)) / n
    }
}

/// Radius `t` maximizing the share of `e_k(m) t^k` in `prod_i (1 + m_i t)`.
///
/// The coefficients of a determinant in one variable scale roughly like the
/// elementary symmetric functions of the magnitudes `m`, so sampling on this
/// circle keeps the wanted coefficient from being swamped by its neighbours.
pub fn balanced_radius(mags: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0_f64; mags.len() + 1];
    e[0] = 1.0;
    for (i, &m) in mags.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += m.abs() * e[j - 1];
        }
    }
    if k >= e.len() || e[k] <= 0.0 || k == 0 {
        return 1.0;
    }
    // Among radii within a small factor of the best share, take the one
    // closest to the unit circle.
    let share = |t: f64| {
        let lt = t.ln();
        let terms: Vec<f64> = e
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0.0)
            .map(|(j, c)| c.ln() + j as f64 * lt)
            .collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + terms.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
        e[k].ln() + k as f64 * lt - lse
    };
    let grid: Vec<f64> = (-40..=40).map(|i| 2f64.powf(i as f64 / 4.0)).collect();
    let shares: Vec<f64> = grid.iter().map(|&t| share(t)).collect();
    let best = shares.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    grid.iter()
        .zip(&shares)
        .filter(|(_, s)| **s >= best - 0.1)
        .map(|(t, _)| *t)
        .min_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()))
        .unwrap_or(1.0)
}

/// Coefficient of `y^ky w^kw` of `f(x, y, w)` as a polynomial in `x` of degree
/// at most `deg_x`, where `f` is a determinant filled by `fill`.
#[allow(clippy::too_many_arguments)]
pub fn extract_xyw<F>(
    dim: usize,
    deg_x: usize,
    ky: usize,
    deg_y: usize,
    kw: usize,
    deg_w: usize,
    fill: F,
) -> Result<Vec<f64>>
where
    F: Fn(Complex64, Complex64, Complex64, &mut [Complex64]),
{
    extract_xyw_scaled(dim, deg_x, (ky, deg_y, 1.0), (kw, deg_w, 1.0), fill)
}

/// As [`extract_xyw`], with `y` and `w` sampled on circles of the given radii.
/// Each of `y` and `w` is `(power, degree, radius)`.
pub fn extract_xyw_scaled<F>(
    dim: usize,
    deg_x: usize,
    (ky, deg_y, ry): (usize, usize, f64),
    (kw, deg_w, rw): (usize, usize, f64),
    fill: F,
) -> Result<Vec<f64>>
where
    F: Fn(Complex64, Complex64, Complex64, &mut [Complex64]),
{
    if ky > deg_y || kw > deg_w {
        return Ok(vec![0.0]);
    }
    let nx = deg_x + 1;
    let xs: Vec<Complex64> = (0..nx)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nx as f64))
        .collect();
    let ys = Nodes::with_radius(ky, deg_y, ry);
    let ws = Nodes::with_radius(kw, deg_w, rw);
    let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut g = vec![Complex64::new(0.0, 0.0); nx];
    let mut hmax: f64 = 0.0;
    for (a, &x) in xs.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, &y) in ys.points.iter().enumerate() {
            let wy = ys.weight(b);
            for (c, &w) in ws.points.iter().enumerate() {
                fill(x, y, w, &mut buf);
                hmax = hmax.max(hadamard_bound(&buf, dim));
                acc += det_lu(&mut buf, dim) * wy * ws.weight(c);
            }
        }
        g[a] = acc;
    }
    let mut coeffs = vec![0.0; nx];
    let mut imag: f64 = 0.0;
    for (j, out) in coeffs.iter_mut().enumerate() {
        let s: Complex64 = g
            .iter()
            .zip(&xs)
            .map(|(v, x)| v * x.powi(-(j as i32)))
            .sum::<Complex64>()
            / nx as f64;
        *out = s.re;
        imag = imag.max(s.im.abs());
    }
    let scale = coeffs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if imag > IMAG_RESIDUE_TOL * scale && imag > 1e-12 * hmax {
        return Err(GcrssError::Conditioning(format!(
            "interpolation left an imaginary residue {imag:e} against scale {scale:e}"
        )));
    }
    if coeffs.iter().any(|v| !v.is_finite()) {
        return Err(GcrssError::Conditioning("non-finite interpolated coefficient".into()));
    }
    Ok(coeffs)
}
