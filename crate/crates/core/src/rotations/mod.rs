//! `SO(n)` with the bi-invariant metric `-tr(p^-1 X p^-1 Y) / 2`, the
//! expansion coefficients with the rotation sign, the alternative Lie-group
//! PGA driven by the splitting isometries `gamma_{a,b}`, and quaternion
//! helpers for `SO(3)`.

mod altpga;
mod io;
mod quaternion;

pub use altpga::{alt_pga, AltPgaReport, AltPgaStep};
pub use io::{read_rotations_csv, write_rotations_csv, RotationFormat};
pub use quaternion::{from_quaternion, geodesic_eval, to_quaternion, Quaternion};

use crate::error::{PgaError, Result};
use crate::linalg::{mat_exp, mat_log_rot, skew_part, trace_prod, Mat};
use crate::manifold::{Frame, Manifold, Point, Tangent};
use crate::spd::{alpha1_curvature, alpha1_signed, coeff_series_curvature, coeff_series_signed, f14_curvature, f14_signed};
use serde::{Deserialize, Serialize};

const SIGN: f64 = -1.0;

/// Splitting of the removed geodesic component between the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltPgaConfig {
    pub a: f64,
    pub b: f64,
    pub k_max: usize,
    /// Re-center the transformed data at its mean after each step.
    pub recenter: bool,
}

impl AltPgaConfig {
    pub fn new(a: f64, b: f64, k_max: usize) -> Result<Self> {
        let c = Self { a, b, k_max, recenter: false };
        c.validate()?;
        Ok(c)
    }

    /// `a = b = 1/2`.
    pub fn half(k_max: usize) -> Self {
        Self { a: 0.5, b: 0.5, k_max, recenter: false }
    }

    /// `a = 1, b = 0`.
    pub fn left(k_max: usize) -> Self {
        Self { a: 1.0, b: 0.0, k_max, recenter: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() || (self.a + self.b - 1.0).abs() >= 1e-12 {
            return Err(PgaError::InvalidInput(format!("a + b must equal 1 (got {} + {})", self.a, self.b)));
        }
        if self.k_max == 0 {
            return Err(PgaError::InvalidInput("k_max must be positive".into()));
        }
        Ok(())
    }
}

/// Which isometry family the mean displacement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    /// `a = b = 1/2`.
    Half,
    /// `a = 1, b = 0`.
    Left,
}

fn check_so(x: &Mat) -> Result<usize> {
    if !x.is_square() || x.nrows() < 2 {
        return Err(PgaError::DimensionMismatch("expected a square matrix of size >= 2".into()));
    }
    Ok(x.nrows())
}

fn so_frame(n: usize) -> Frame {
    let m = Manifold::So { n };
    Frame::new(m, m.base_point()).expect("identity is a valid rotation")
}

/// `-tr(p^-1 X p^-1 Y) / 2`.
pub fn so_metric(p: &Point, x: &Tangent, y: &Tangent) -> Result<f64> {
    let n = check_so(p)?;
    Manifold::So { n }.metric(p, x, y)
}

/// `(t_1, t_3)` of the projection of `Exp_I(eps q)` onto `Exp_I(s v)`.
pub fn projection_coeff_series(q: &Mat, v: &Mat) -> (f64, f64) {
    coeff_series_signed(SIGN, q, v)
}

pub fn projection_coeff_series_curvature(q: &Mat, v: &Mat) -> Result<(f64, f64)> {
    let n = check_so(q)?;
    Ok(coeff_series_curvature(&so_frame(n), q, v))
}

pub fn f14(tangents: &[Mat], v: &Mat) -> f64 {
    f14_signed(SIGN, tangents, v)
}

pub fn f14_curvature_form(tangents: &[Mat], v: &Mat) -> Result<f64> {
    let n = check_so(v)?;
    Ok(f14_curvature(&so_frame(n), tangents, v))
}

/// `alpha_{1,j}` (0-based `j >= 1`).
pub fn alpha1(tangents: &[Mat], u: &[Mat], j: usize) -> Result<f64> {
    if j == 0 || j >= u.len() {
        return Err(PgaError::IndexOutOfRange { index: j, max: u.len() });
    }
    Ok(alpha1_signed(SIGN, tangents, &u[0], &u[j]))
}

pub fn alpha1_curvature_form(tangents: &[Mat], u: &[Mat], j: usize) -> Result<f64> {
    if j == 0 || j >= u.len() {
        return Err(PgaError::IndexOutOfRange { index: j, max: u.len() });
    }
    let n = check_so(&u[0])?;
    Ok(alpha1_curvature(&so_frame(n), tangents, &u[0], &u[j]))
}

/// `|Log(Exp(-s v) Exp(eps q))|^2` in the rotation metric: the squared
/// distance from `Exp_I(eps q)` to `Exp_I(s v)`.
pub fn projection_objective(v: &Mat, q: &Mat, s: f64, eps: f64) -> Result<f64> {
    let l = mat_log_rot(&(mat_exp(&(v * -s)) * mat_exp(&(q * eps))))?;
    Ok(-0.5 * trace_prod(&l, &l))
}

/// `p -> Exp_I(-a t v) p Exp_I(-b t v)` with `b = 1 - a`.
pub fn gamma_ab(v: &Tangent, t: f64, a: f64, p: &Point) -> Point {
    let b = 1.0 - a;
    let left = if a == 0.0 { Mat::identity(p.nrows(), p.nrows()) } else { mat_exp(&(v * (-a * t))) };
    let right = if b == 0.0 { Mat::identity(p.nrows(), p.nrows()) } else { mat_exp(&(v * (-b * t))) };
    left * p * right
}

/// Leading coefficient of `Log_I mu(D')` after removing the component along
/// `v` from data `Exp_I(eps q_i)` (centered tangents): `x_3` for
/// [`Split::Half`], `x_2` for [`Split::Left`].
pub fn mean_displacement_series(tangents: &[Mat], v: &Tangent, case: Split) -> Result<Tangent> {
    let n = check_so(v)?;
    if tangents.is_empty() {
        return Err(PgaError::InvalidInput("empty data set".into()));
    }
    if tangents.iter().any(|q| q.shape() != (n, n)) {
        return Err(PgaError::DimensionMismatch("tangent sizes differ".into()));
    }
    let mut x = Mat::zeros(n, n);
    for q in tangents {
        let qv = q * v;
        let tr = qv.trace();
        match case {
            Split::Left => x += (v * q - &qv) * (0.25 * tr),
            Split::Half => {
                let vq = v * q;
                let vv = v * v;
                let qq = q * q;
                let a = (&vq * v) * 2.0 - &qv * v - &vv * q;
                let b = (&qv * q) * 2.0 - &qq * v - &vq * q;
                let c = trace_prod(&qq, &vv) - trace_prod(&qv, &qv);
                x += a * (tr * tr) - b * (4.0 * tr) + v * (4.0 * tr * c);
            }
        }
    }
    let scale = match case {
        Split::Left => 1.0,
        Split::Half => 1.0 / 96.0,
    };
    Ok(skew_part(&(x * (scale / tangents.len() as f64))))
}

/// Curvature form of `x_3`:
/// `(1/24N) sum [<q,v>^2 R(q,v)v + 2<q,v> R(v,q)q - 2<q,v>(|q|^2 - <q,v>^2) K v]`
/// with `K |q|^2 sin^2 = R(q,v,v,q)` and `R(x,y)z = [z,[x,y]]`.
pub fn mean_displacement_x3_curvature(tangents: &[Mat], v: &Tangent) -> Result<Tangent> {
    let n = check_so(v)?;
    let frame = so_frame(n);
    let mut x = Mat::zeros(n, n);
    for q in tangents {
        let c = frame.inner(q, v);
        let rqvv = crate::manifold::curvature_op(q, v, v);
        let rvqq = crate::manifold::curvature_op(v, q, q);
        let sec = crate::manifold::riemann_tensor(&frame, q, v, v, q);
        x += rqvv * (c * c) + rvqq * (2.0 * c) - v * (2.0 * c * sec);
    }
    Ok(x / (24.0 * tangents.len() as f64))
}
