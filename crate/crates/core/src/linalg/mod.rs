//! Dense linear algebra for small matrices: symmetric eigendecomposition,
//! matrix exponential and logarithms, the derivative of the exponential,
//! and minimizers used by the projection and PGA solvers.
//!
//! Everything here works on `nalgebra::DMatrix<f64>` and is sized for the
//! matrices that appear in practice (n up to a few dozen).

mod dexp;
mod eig;
mod expm;
mod logm;
mod optimize;

pub use dexp::{dexp, dexp_block, dexp_symmetric};
pub use eig::{sym_eig, EigenPairs};
pub use expm::{expm_pade, expm_symmetric, mat_exp, rodrigues};
pub use logm::{mat_log_rot, mat_log_spd, rotation_angle_so3, spd_sqrt};
pub use optimize::{
    minimize_newton, minimize_on_sphere, MinimizeOptions, MinimizeReport, SphereMinimizer,
};

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Frobenius norm.
pub fn fro(a: &Mat) -> f64 {
    a.norm()
}

pub fn sym_part(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

pub fn skew_part(a: &Mat) -> Mat {
    (a - a.transpose()) * 0.5
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// Symmetric within `1e-12 * ||A||` (absolute floor for the zero matrix).
pub fn is_symmetric(a: &Mat) -> bool {
    a.is_square() && (a - a.transpose()).norm() <= 1e-12 * a.norm().max(1e-300)
}

pub fn is_skew(a: &Mat) -> bool {
    a.is_square() && (a + a.transpose()).norm() <= 1e-12 * a.norm().max(1e-300)
}

/// Trace of a product without forming it.
pub fn trace_prod(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| x * y)
        .sum()
}

/// 3x3 skew matrix with `hat(w) v = w x v`.
pub fn hat3(w: [f64; 3]) -> Mat {
    Mat::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0])
}

pub fn vee3(x: &Mat) -> [f64; 3] {
    [
        0.5 * (x[(2, 1)] - x[(1, 2)]),
        0.5 * (x[(0, 2)] - x[(2, 0)]),
        0.5 * (x[(1, 0)] - x[(0, 1)]),
    ]
}

/// Ordinary least squares fit of `ln y` against `ln x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn loglog_fit(x: &[f64], y: &[f64]) -> LogLogFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LogLogFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LogLogFit { slope, intercept, r_squared }
}

/// Pearson correlation; `None` when either sample has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Angle between two lines (sign-insensitive), accurate for small angles.
pub fn line_angle(a: &Vector, b: &Vector) -> f64 {
    let a = a.normalize();
    let mut b = b.normalize();
    if a.dot(&b) < 0.0 {
        b = -b;
    }
    let chord = (&a - &b).norm();
    2.0 * (0.5 * chord).min(1.0).asin()
}

/// Gram-Schmidt of `v` against an orthonormal list; returns the residual.
pub fn orthogonalize(v: &Vector, basis: &[Vector]) -> Vector {
    let mut out = v.clone();
    // two passes keep the residual orthogonal to machine precision
    for _ in 0..2 {
        for b in basis {
            let c = out.dot(b);
            out -= b * c;
        }
    }
    out
}

/// Orthonormal basis of the complement of `span(basis)` in R^dim.
pub fn complement_basis(dim: usize, basis: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    let need = dim.saturating_sub(basis.len());
    let mut candidates: Vec<(usize, f64)> = (0..dim)
        .map(|i| {
            let e = Vector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
            (i, orthogonalize(&e, basis).norm())
        })
        .collect();
    // prefer canonical vectors far from the span; stable order otherwise
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in candidates {
        if out.len() == need {
            break;
        }
        let e = Vector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
        let mut all: Vec<Vector> = basis.to_vec();
        all.extend(out.iter().cloned());
        let r = orthogonalize(&e, &all);
        let n = r.norm();
        if n > 1e-8 {
            out.push(r / n);
        }
    }
    out
}
