//! The three symmetric spaces and manifold-generic statistics.
//!
//! Points and tangent vectors are plain matrices: a sphere point in
//! `S^n_r` is an `(n+1) x 1` column, and points of `P(n)` and `SO(n)` are
//! `n x n` matrices. The [`Manifold`] value carries the kind, and every
//! operation takes its base point explicitly.

mod curvature;
mod frame;
mod project;
mod stats;

pub use curvature::{curvature_op, riemann_tensor, sectional_curvature};
pub use frame::{Frame, Sample};
pub use project::{
    newton_coefficients, project, project_numeric, project_with, solve_coefficients, CoeffSolve, GeodesicSubspace,
    Projection,
};
pub use stats::{intrinsic_mean, intrinsic_mean_with, intrinsic_variance, MeanResult};

use crate::error::{PgaError, Result};
use crate::linalg::{
    is_skew, mat_exp, mat_log_rot, mat_log_spd, spd_sqrt, sym_eig, trace_prod, Mat,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Point = Mat;
pub type Tangent = Mat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Manifold {
    /// `S^n_r` embedded in `R^(n+1)`.
    Sphere { n: usize, r: f64 },
    /// Positive-definite `n x n` matrices, metric `(1/2) tr(p^-1 X p^-1 Y)`.
    Spd { n: usize },
    /// Special orthogonal group, metric `-(1/2) tr(p^-1 X p^-1 Y)`.
    So { n: usize },
}

impl Manifold {
    pub fn sphere(n: usize, r: f64) -> Result<Self> {
        if n < 2 || !(r > 0.0) || !r.is_finite() {
            return Err(PgaError::InvalidInput(format!("sphere needs n >= 2 and r > 0 (got n={n}, r={r})")));
        }
        Ok(Manifold::Sphere { n, r })
    }

    pub fn spd(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(PgaError::InvalidInput("P(n) needs n >= 1".into()));
        }
        Ok(Manifold::Spd { n })
    }

    pub fn so(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(PgaError::InvalidInput("SO(n) needs n >= 2".into()));
        }
        Ok(Manifold::So { n })
    }

    pub fn name(&self) -> String {
        match self {
            Manifold::Sphere { n, r } => format!("S^{n}_{r}"),
            Manifold::Spd { n } => format!("P({n})"),
            Manifold::So { n } => format!("SO({n})"),
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Manifold::Sphere { .. })
    }

    /// Dimension of each tangent space.
    pub fn dim(&self) -> usize {
        match *self {
            Manifold::Sphere { n, .. } => n,
            Manifold::Spd { n } => n * (n + 1) / 2,
            Manifold::So { n } => n * (n - 1) / 2,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match *self {
            Manifold::Sphere { n, .. } => (n + 1, 1),
            Manifold::Spd { n } | Manifold::So { n } => (n, n),
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match *self {
            Manifold::Sphere { r, .. } => PI * r,
            Manifold::Spd { .. } => f64::INFINITY,
            Manifold::So { .. } => PI,
        }
    }

    /// `r e_1` on the sphere, the identity otherwise.
    pub fn base_point(&self) -> Point {
        match *self {
            Manifold::Sphere { n, r } => {
                let mut p = Mat::zeros(n + 1, 1);
                p[0] = r;
                p
            }
            Manifold::Spd { n } | Manifold::So { n } => Mat::identity(n, n),
        }
    }

    fn check_shape(&self, m: &Mat, what: &str) -> Result<()> {
        if m.shape() != self.shape() {
            return Err(PgaError::DimensionMismatch(format!(
                "{what} has shape {:?}, {} expects {:?}",
                m.shape(),
                self.name(),
                self.shape()
            )));
        }
        Ok(())
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        self.check_shape(p, "point")?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(PgaError::InvalidPoint("non-finite entry".into()));
        }
        match *self {
            Manifold::Sphere { r, .. } => {
                let dev = (p.norm() - r).abs();
                if dev > 1e-10 * r.max(1.0) {
                    return Err(PgaError::InvalidPoint(format!("|p| - r = {dev:e}")));
                }
            }
            Manifold::Spd { .. } => {
                if !crate::linalg::is_symmetric(p) {
                    return Err(PgaError::InvalidPoint("matrix is not symmetric".into()));
                }
                let e = sym_eig(p)?;
                let min = e.values.iter().cloned().fold(f64::INFINITY, f64::min);
                if min <= 0.0 {
                    return Err(PgaError::NotPositiveDefinite(min));
                }
            }
            Manifold::So { n } => {
                let orth = (p.transpose() * p - Mat::identity(n, n)).norm();
                if orth > 1e-9 {
                    return Err(PgaError::InvalidPoint(format!("|p^T p - I| = {orth:e}")));
                }
                if p.determinant() < 0.0 {
                    return Err(PgaError::InvalidPoint("determinant is -1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn check_tangent(&self, p: &Point, x: &Tangent) -> Result<()> {
        self.check_shape(x, "tangent")?;
        match *self {
            Manifold::Sphere { r, .. } => {
                let d = (x.transpose() * p)[0].abs();
                if d > 1e-10 * r * x.norm().max(1.0) {
                    return Err(PgaError::InvalidTangent(format!("<X, p> = {d:e}")));
                }
            }
            Manifold::Spd { .. } => {
                if !crate::linalg::is_symmetric(x) {
                    return Err(PgaError::InvalidTangent("not symmetric".into()));
                }
            }
            Manifold::So { .. } => {
                let y = p.transpose() * x;
                if !is_skew(&y) && y.norm() > 1e-300 {
                    return Err(PgaError::InvalidTangent("p^-1 X is not skew-symmetric".into()));
                }
            }
        }
        Ok(())
    }

    /// Riemannian inner product at `p`.
    pub fn metric(&self, p: &Point, x: &Tangent, y: &Tangent) -> Result<f64> {
        self.check_shape(x, "tangent")?;
        self.check_shape(y, "tangent")?;
        Ok(match self {
            Manifold::Sphere { .. } => x.dot(y),
            Manifold::Spd { .. } => {
                let pi = p.clone().try_inverse().ok_or(PgaError::NotPositiveDefinite(0.0))?;
                0.5 * trace_prod(&(&pi * x), &(&pi * y))
            }
            Manifold::So { .. } => -0.5 * trace_prod(&(p.transpose() * x), &(p.transpose() * y)),
        })
    }

    pub fn norm(&self, p: &Point, x: &Tangent) -> Result<f64> {
        Ok(self.metric(p, x, x)?.max(0.0).sqrt())
    }

    /// Riemannian exponential; rejects vectors beyond the injectivity radius.
    pub fn exp(&self, p: &Point, x: &Tangent) -> Result<Point> {
        self.check_shape(p, "point")?;
        self.check_shape(x, "tangent")?;
        match *self {
            Manifold::Sphere { r, .. } => {
                let a = x.norm();
                if a >= PI * r {
                    return Err(PgaError::OutOfInjectivityRadius { norm: a, radius: PI * r });
                }
                Ok(sphere_exp(p, x, r))
            }
            Manifold::Spd { .. } => {
                let (g, gi) = spd_sqrt(p)?;
                let inner = &gi * x * &gi;
                let e = mat_exp(&crate::linalg::sym_part(&inner));
                Ok(crate::linalg::sym_part(&(&g * e * &g)))
            }
            Manifold::So { .. } => {
                let y = crate::linalg::skew_part(&(p.transpose() * x));
                let nrm = y.norm() / 2f64.sqrt();
                if nrm >= PI {
                    return Err(PgaError::OutOfInjectivityRadius { norm: nrm, radius: PI });
                }
                Ok(p * mat_exp(&y))
            }
        }
    }

    /// Riemannian logarithm.
    pub fn log(&self, p: &Point, q: &Point) -> Result<Tangent> {
        self.check_shape(p, "point")?;
        self.check_shape(q, "point")?;
        match *self {
            Manifold::Sphere { r, .. } => sphere_log(p, q, r),
            Manifold::Spd { .. } => {
                let (g, gi) = spd_sqrt(p)?;
                let inner = crate::linalg::sym_part(&(&gi * q * &gi));
                let l = mat_log_spd(&inner)?;
                Ok(crate::linalg::sym_part(&(&g * l * &g)))
            }
            Manifold::So { .. } => {
                let rel = p.transpose() * q;
                Ok(p * mat_log_rot(&rel)?)
            }
        }
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_shape(p, "point")?;
        self.check_shape(q, "point")?;
        if p == q {
            return Ok(0.0);
        }
        match *self {
            Manifold::Sphere { r, .. } => {
                let (theta, _) = sphere_angle(p, q, r);
                Ok(r * theta)
            }
            Manifold::Spd { .. } => {
                let (_, gi) = spd_sqrt(p)?;
                let e = sym_eig(&crate::linalg::sym_part(&(&gi * q * &gi)))?;
                let mut s = 0.0;
                for &l in e.values.iter() {
                    if l <= 0.0 {
                        return Err(PgaError::NotPositiveDefinite(l));
                    }
                    s += l.ln().powi(2);
                }
                Ok((0.5 * s).sqrt())
            }
            Manifold::So { .. } => {
                let l = mat_log_rot(&(p.transpose() * q))?;
                Ok(l.norm() / 2f64.sqrt())
            }
        }
    }

    /// Orthonormal basis of `T_p M` (canonical Gram-Schmidt on the sphere,
    /// the transported canonical basis on the matrix spaces).
    pub fn tangent_basis(&self, p: &Point) -> Result<Vec<Tangent>> {
        let frame = Frame::new(*self, p.clone())?;
        Ok((0..self.dim()).map(|e| frame.tangent_at_mu_unit(e)).collect())
    }
}

/// Sphere exponential without the injectivity check.
pub(crate) fn sphere_exp(p: &Mat, x: &Mat, r: f64) -> Mat {
    let a = x.norm();
    if a == 0.0 {
        return p.clone();
    }
    let out = p * (a / r).cos() + x * (r * (a / r).sin() / a);
    // renormalize against drift
    &out * (r / out.norm())
}

/// Angle `d(p, q) / r` and the unit direction of `q` away from `p`.
pub(crate) fn sphere_angle(p: &Mat, q: &Mat, r: f64) -> (f64, Option<Mat>) {
    let c = p.dot(q) / (r * r);
    let w = q - p * c;
    let wn = w.norm();
    let theta = (wn / r).atan2(c);
    if wn == 0.0 {
        (theta, None)
    } else {
        (theta, Some(w / wn))
    }
}

pub(crate) fn sphere_log(p: &Mat, q: &Mat, r: f64) -> Result<Mat> {
    let (theta, dir) = sphere_angle(p, q, r);
    match dir {
        None if theta < 1.0 => Ok(Mat::zeros(p.nrows(), 1)),
        None => Err(PgaError::CutLocus("antipodal points on the sphere".into())),
        Some(u) => {
            if PI - theta < 1e-8 {
                return Err(PgaError::CutLocus("antipodal points on the sphere".into()));
            }
            Ok(u * (r * theta))
        }
    }
}
