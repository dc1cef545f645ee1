//! `P(n)` at the identity: the `GL(n)` action, the geodesic projection
//! objective, and the trace forms of the expansion coefficients.
//!
//! The trace forms are shared with `SO(n)` through a metric sign: the inner
//! product is `sign * tr(XY) / 2` with `sign = 1` here and `-1` on rotations.

use crate::error::{PgaError, Result};
use crate::linalg::{mat_exp, mat_log_spd, sym_part, trace_prod, Mat, Vector};
use crate::manifold::{Frame, Manifold, Point};
use crate::pga::{numeric_alpha_row, CovarianceOperator, Ladder, TangentDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    g: Mat,
}

impl GroupElement {
    pub fn new(g: Mat) -> Result<Self> {
        if !g.is_square() {
            return Err(PgaError::DimensionMismatch("group element must be square".into()));
        }
        let det = g.determinant();
        if det.abs() <= 1e-12 {
            return Err(PgaError::InvalidInput(format!("singular group element (det {det:e})")));
        }
        Ok(Self { g })
    }

    pub fn matrix(&self) -> &Mat {
        &self.g
    }
}

/// `g p g^T`.
pub fn act(g: &GroupElement, p: &Point) -> Result<Point> {
    if g.g.nrows() != p.nrows() || !p.is_square() {
        return Err(PgaError::DimensionMismatch("group element and point sizes differ".into()));
    }
    Ok(sym_part(&(&g.g * p * g.g.transpose())))
}

/// `h(s, eps) = d(Exp_I(s v), Exp_I(eps q))^2`, evaluated as
/// `tr(Log(g)^2) / 2` with `g = Exp(-sv/2) Exp(eps q) Exp(-sv/2)`.
pub fn projection_objective(v: &Mat, q: &Mat, s: f64, eps: f64) -> Result<f64> {
    let w = splitting_log(v, q, s, eps)?;
    Ok(0.5 * trace_prod(&w, &w))
}

fn splitting_log(v: &Mat, q: &Mat, s: f64, eps: f64) -> Result<Mat> {
    let half = mat_exp(&(v * (-0.5 * s)));
    let g = sym_part(&(&half * mat_exp(&(q * eps)) * &half));
    mat_log_spd(&g).map_err(|e| PgaError::LogDomain(e.to_string()))
}

/// `dh/ds = -tr(Log(g) v)`.
pub fn projection_objective_ds(v: &Mat, q: &Mat, s: f64, eps: f64) -> Result<f64> {
    Ok(-trace_prod(&splitting_log(v, q, s, eps)?, v))
}

pub(crate) fn inner(sign: f64, x: &Mat, y: &Mat) -> f64 {
    sign * 0.5 * trace_prod(x, y)
}

pub(crate) fn coeff_series_signed(sign: f64, q: &Mat, v: &Mat) -> (f64, f64) {
    let qv = q * v;
    let t1 = inner(sign, q, v);
    let trqv = qv.trace();
    let t3 = trqv * (trace_prod(&qv, &qv) - trace_prod(&(q * q), &(v * v))) / 24.0;
    (t1, t3)
}

pub(crate) fn f14_signed(sign: f64, tangents: &[Mat], v: &Mat) -> f64 {
    let n = tangents.len() as f64;
    let s: f64 = tangents
        .iter()
        .map(|q| {
            let qv = q * v;
            qv.trace().powi(2) * (trace_prod(&(q * q), &(v * v)) - trace_prod(&qv, &qv))
        })
        .sum();
    sign * s / (48.0 * n)
}

pub(crate) fn alpha1_signed(sign: f64, tangents: &[Mat], u1: &Mat, uj: &Mat) -> f64 {
    let n = tangents.len() as f64;
    let s: f64 = tangents
        .iter()
        .map(|q| {
            let q2 = q * q;
            let q1 = q * u1;
            let a = q1.trace().powi(2)
                * (trace_prod(&q2, &(u1 * uj)) + trace_prod(&q2, &(uj * u1)) - 2.0 * trace_prod(&q1, &(q * uj)));
            let b = 2.0 * q1.trace() * trace_prod(q, uj) * (trace_prod(&q2, &(u1 * u1)) - trace_prod(&q1, &q1));
            a + b
        })
        .sum();
    sign * s / (48.0 * n)
}

/// Curvature forms, written with `R(x,y)z = [z,[x,y]]` and the frame metric.
pub(crate) fn coeff_series_curvature(frame: &Frame, q: &Mat, v: &Mat) -> (f64, f64) {
    let c = frame.inner(q, v);
    (c, c * crate::manifold::riemann_tensor(frame, q, v, v, q) / 12.0)
}

pub(crate) fn f14_curvature(frame: &Frame, tangents: &[Mat], v: &Mat) -> f64 {
    let n = tangents.len() as f64;
    let s: f64 = tangents
        .iter()
        .map(|q| frame.inner(q, v).powi(2) * crate::manifold::riemann_tensor(frame, q, v, v, q))
        .sum();
    -s / (12.0 * n)
}

pub(crate) fn alpha1_curvature(frame: &Frame, tangents: &[Mat], u1: &Mat, uj: &Mat) -> f64 {
    use crate::manifold::riemann_tensor as rt;
    let n = tangents.len() as f64;
    let s: f64 = tangents
        .iter()
        .map(|q| {
            let c1 = frame.inner(q, u1);
            c1 * frame.inner(q, uj) * rt(frame, q, u1, u1, q) + c1 * c1 * rt(frame, q, u1, uj, q)
        })
        .sum();
    -s / (6.0 * n)
}

fn spd_frame(n: usize) -> Frame {
    let m = Manifold::Spd { n };
    Frame::new(m, m.base_point()).expect("identity is a valid point")
}

fn check_square(x: &Mat) -> Result<usize> {
    if !x.is_square() {
        return Err(PgaError::DimensionMismatch("expected a square matrix".into()));
    }
    Ok(x.nrows())
}

/// `(t_1, t_3)` for the projection of `Exp_I(eps q)` onto the geodesic `Exp_I(s v)`.
pub fn projection_coeff_series(q: &Mat, v: &Mat) -> (f64, f64) {
    coeff_series_signed(1.0, q, v)
}

/// The same coefficients from the sectional-curvature form.
pub fn projection_coeff_series_curvature(q: &Mat, v: &Mat) -> Result<(f64, f64)> {
    let n = check_square(q)?;
    Ok(coeff_series_curvature(&spd_frame(n), q, v))
}

/// `f_{1,4}(v)` for tangents at the identity.
pub fn f14(tangents: &[Mat], v: &Mat) -> f64 {
    f14_signed(1.0, tangents, v)
}

pub fn f14_curvature_form(tangents: &[Mat], v: &Mat) -> Result<f64> {
    let n = check_square(v)?;
    Ok(f14_curvature(&spd_frame(n), tangents, v))
}

/// `alpha_{1,j}` (0-based `j >= 1`) from the trace form.
pub fn alpha1(tangents: &[Mat], u: &[Mat], j: usize) -> Result<f64> {
    if j == 0 || j >= u.len() {
        return Err(PgaError::IndexOutOfRange { index: j, max: u.len() });
    }
    Ok(alpha1_signed(1.0, tangents, &u[0], &u[j]))
}

pub fn alpha1_curvature_form(tangents: &[Mat], u: &[Mat], j: usize) -> Result<f64> {
    if j == 0 || j >= u.len() {
        return Err(PgaError::IndexOutOfRange { index: j, max: u.len() });
    }
    let n = check_square(&u[0])?;
    Ok(alpha1_curvature(&spd_frame(n), tangents, &u[0], &u[j]))
}

/// `alpha_{2,j}` for every `j`, by series extraction of the envelope
/// gradient of the second objective (priors fixed at `u_1`).
pub fn alpha2_row(ds: &TangentDataset, cov: &CovarianceOperator, ladder: &Ladder, agreement: f64) -> Result<Vector> {
    if !matches!(ds.manifold(), Manifold::Spd { .. }) {
        return Err(PgaError::UnsupportedManifold(ds.manifold().name()));
    }
    numeric_alpha_row(ds, &cov.u, 1, ladder, agreement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_sym(rng: &mut ChaCha8Rng, n: usize) -> Mat {
        sym_part(&Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)))
    }

    fn unit(x: Mat) -> Mat {
        let n = (0.5 * trace_prod(&x, &x)).sqrt();
        x / n
    }

    #[test]
    fn action_examples() {
        let p = Mat::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let id = GroupElement::new(Mat::identity(2, 2)).unwrap();
        assert_eq!(act(&id, &p).unwrap(), p);
        let (root, _) = crate::linalg::spd_sqrt(&p).unwrap();
        let g = GroupElement::new(root).unwrap();
        assert!((act(&g, &Mat::identity(2, 2)).unwrap() - &p).norm() < 1e-14);
        assert!(GroupElement::new(Mat::zeros(2, 2)).is_err());
    }

    #[test]
    fn objective_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let q = rand_sym(&mut rng, 3);
        let v = unit(rand_sym(&mut rng, 3));
        let h0 = projection_objective(&v, &q, 0.0, 0.3).unwrap();
        assert!((h0 - 0.09 * 0.5 * trace_prod(&q, &q)).abs() < 1e-14);
        assert!(projection_objective(&v, &v, 0.4, 0.4).unwrap() < 1e-28);
        assert!(projection_objective_ds(&v, &v, 0.4, 0.4).unwrap().abs() < 1e-14);
    }

    #[test]
    fn objective_quadratic_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let q = unit(rand_sym(&mut rng, 3));
        let v = unit(rand_sym(&mut rng, 3));
        let quartic = (trace_prod(&(&q * &q), &(&v * &v)) - trace_prod(&(&q * &v), &(&q * &v))) / 12.0;
        for &(s, e) in &[(0.01, 0.02), (0.02, -0.01), (0.015, 0.015)] {
            let approx = e * e * trace_prod(&q, &q) / 2.0 + s * s - e * s * trace_prod(&q, &v) + quartic * e * e * s * s;
            let exact = projection_objective(&v, &q, s, e).unwrap();
            assert!((exact - approx).abs() < 1e-9, "{exact} {approx}");
        }
    }

    #[test]
    fn commuting_and_orthogonal_cases() {
        let d = |a: f64, b: f64, c: f64| Mat::from_diagonal(&Vector::from_vec(vec![a, b, c]));
        assert_eq!(projection_coeff_series(&d(1.0, 2.0, 0.5), &d(0.3, -0.2, 1.0)).1, 0.0);
        let q = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let v = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(projection_coeff_series(&q, &v), (0.0, 0.0));
        assert_eq!(f14(&[q.clone()], &v), 0.0);
        assert_eq!(f14(&[d(1.0, 2.0, 0.5)], &d(0.3, -0.2, 1.0)), 0.0);
    }

    #[test]
    fn trace_and_curvature_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let qs: Vec<Mat> = (0..10).map(|_| rand_sym(&mut rng, 3)).collect();
        let u: Vec<Mat> = (0..3).map(|_| unit(rand_sym(&mut rng, 3))).collect();
        for q in &qs {
            let a = projection_coeff_series(q, &u[0]);
            let b = projection_coeff_series_curvature(q, &u[0]).unwrap();
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
            if a.0 > 0.0 {
                assert!(a.1 <= 1e-15);
            }
        }
        assert!((f14(&qs, &u[0]) - f14_curvature_form(&qs, &u[0]).unwrap()).abs() < 1e-12);
        for j in 1..3 {
            let a = alpha1(&qs, &u, j).unwrap();
            let b = alpha1_curvature_form(&qs, &u, j).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn alpha1_matches_finite_difference_of_f14() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let qs: Vec<Mat> = (0..10).map(|_| rand_sym(&mut rng, 3)).collect();
        let u: Vec<Mat> = (0..2).map(|_| unit(rand_sym(&mut rng, 3))).collect();
        let h = 1e-5;
        let fd = (f14(&qs, &(&u[0] + &u[1] * h)) - f14(&qs, &(&u[0] - &u[1] * h))) / (2.0 * h);
        let a = alpha1(&qs, &u, 1).unwrap();
        assert!((fd - a).abs() <= 1e-6 * a.abs(), "{fd} {a}");
    }
}
