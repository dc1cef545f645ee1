//! Closed forms on `S^n_r`: projection onto a geodesic subspace through the
//! mean, the cubic expansion of projection coefficients, and the quartic
//! objective coefficients behind the direction corrections.
//!
//! Tangent vectors here are plain vectors (ambient or frame coordinates);
//! only inner products enter.

use crate::error::{PgaError, Result};
use crate::linalg::{Mat, Vector};
use crate::manifold::Manifold;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    pub n: usize,
    pub r: f64,
}

impl SphereParams {
    pub fn new(n: usize, r: f64) -> Result<Self> {
        Manifold::sphere(n, r)?;
        Ok(Self { n, r })
    }

    pub fn manifold(&self) -> Manifold {
        Manifold::Sphere { n: self.n, r: self.r }
    }
}

/// Closest point to `p` on `Exp_mu(span{directions})`: the normalized
/// orthogonal projection of `p` onto `span{mu/r, v_1, ..}`, scaled to radius `r`.
pub fn closed_form_projection(mu: &Mat, directions: &[Mat], p: &Mat, r: f64) -> Result<Mat> {
    let mut w = mu * (mu.dot(p) / (r * r));
    for v in directions {
        w += v * v.dot(p);
    }
    let n = w.norm();
    if n <= 1e-12 * r {
        return Err(PgaError::CutLocus("point is orthogonal to the subspace".into()));
    }
    Ok(w * (r / n))
}

/// `(t_1, t_3)` with `t_m(eps) = t_1 eps + t_3 eps^3 + O(eps^5)` for the
/// projection of `Exp_mu(eps q)` onto `H(basis)`; `m` is 0-based.
pub fn projection_coeff_series(q: &Vector, basis: &[Vector], m: usize, r: f64) -> Result<(f64, f64)> {
    if m >= basis.len() {
        return Err(PgaError::IndexOutOfRange { index: m, max: basis.len() });
    }
    let cm = q.dot(&basis[m]);
    let in_span: f64 = basis.iter().map(|v| q.dot(v).powi(2)).sum();
    Ok((cm, cm / (3.0 * r * r) * (q.norm_squared() - in_span)))
}

/// Quartic coefficient `f_{k,4}(v)` of the k-th objective.
pub fn f4_sphere(tangents: &[Vector], prior: &[Vector], v: &Vector, r: f64) -> f64 {
    let n = tangents.len() as f64;
    let s: f64 = tangents
        .iter()
        .map(|q| {
            let p: f64 = prior.iter().map(|u| q.dot(u).powi(2)).sum::<f64>() + q.dot(v).powi(2);
            p * (p - q.norm_squared())
        })
        .sum();
    s / (3.0 * n * r * r)
}

/// Euclidean gradient of [`f4_sphere`] in `v`.
pub fn f4_sphere_gradient(tangents: &[Vector], prior: &[Vector], v: &Vector, r: f64) -> Vector {
    let n = tangents.len() as f64;
    let mut g = Vector::zeros(v.len());
    for q in tangents {
        let p: f64 = prior.iter().map(|u| q.dot(u).powi(2)).sum::<f64>() + q.dot(v).powi(2);
        g += q * (2.0 * (2.0 * p - q.norm_squared()) * q.dot(v));
    }
    g / (3.0 * n * r * r)
}

/// `alpha_{k,m}`: derivative of `f_{k,4}` at `u_k` (priors `u_0..u_{k-1}`)
/// towards `u_m`. Indices are 0-based.
pub fn alpha_sphere(tangents: &[Vector], u: &[Vector], k: usize, m: usize, r: f64) -> Result<f64> {
    let top = k.max(m);
    if top >= u.len() {
        return Err(PgaError::IndexOutOfRange { index: top, max: u.len() });
    }
    let n = tangents.len() as f64;
    let s: f64 = tangents
        .iter()
        .map(|q| {
            let p: f64 = u[..=k].iter().map(|e| q.dot(e).powi(2)).sum();
            (2.0 * p - q.norm_squared()) * q.dot(&u[k]) * q.dot(&u[m])
        })
        .sum();
    Ok(2.0 * s / (3.0 * n * r * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{project_numeric, GeodesicSubspace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn v2(a: f64, b: f64) -> Vector {
        Vector::from_vec(vec![a, b])
    }

    #[test]
    fn series_examples() {
        let e1 = v2(1.0, 0.0);
        assert_eq!(projection_coeff_series(&v2(0.0, 1.0), &[e1.clone()], 0, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(projection_coeff_series(&e1, &[e1.clone()], 0, 1.0).unwrap(), (1.0, 0.0));
        let q = v2((PI / 3.0).cos(), (PI / 3.0).sin());
        let (t1, t3) = projection_coeff_series(&q, &[e1.clone()], 0, 1.0).unwrap();
        assert!((t1 - 0.5).abs() < 1e-15 && (t3 - 0.125).abs() < 1e-15);
        assert!(matches!(
            projection_coeff_series(&q, &[e1], 1, 1.0),
            Err(PgaError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn f4_examples() {
        let e1 = v2(1.0, 0.0);
        let q = v2((PI / 4.0).cos(), (PI / 4.0).sin());
        assert!((f4_sphere(&[q], &[], &e1, 1.0) + 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(f4_sphere(&[v2(0.3, 0.0)], &[], &e1, 1.0), 0.0);
        assert_eq!(f4_sphere(&[v2(0.0, 0.3)], &[], &e1, 1.0), 0.0);
    }

    #[test]
    fn alpha_matches_finite_difference_of_f4() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let d = 5;
        let t: Vec<Vector> = (0..12).map(|_| Vector::from_fn(d, |_, _| rng.random_range(-1.0..1.0))).collect();
        let u: Vec<Vector> = (0..d).map(|i| Vector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
        let r = 1.7;
        for k in 0..3 {
            for m in (k + 1)..d {
                let h = 1e-5;
                let f = |s: f64| f4_sphere(&t, &u[..k], &(&u[k] + &u[m] * s), r);
                let fd = (f(h) - f(-h)) / (2.0 * h);
                let a = alpha_sphere(&t, &u, k, m, r).unwrap();
                assert!((fd - a).abs() <= 1e-6 * a.abs().max(1e-3), "{k} {m}: {fd} {a}");
                let g = f4_sphere_gradient(&t, &u[..k], &u[k], r);
                assert!((g.dot(&u[m]) - a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_numeric_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let m = Manifold::sphere(4, 2.0).unwrap();
        let mu = m.base_point();
        let dirs: Vec<Mat> = (1..3).map(|i| {
            let mut v = Mat::zeros(5, 1);
            v[i] = 1.0;
            v
        }).collect();
        for _ in 0..20 {
            let mut x = Mat::from_fn(5, 1, |_, _| rng.random_range(-1.0..1.0));
            x[0] = 0.0;
            let p = m.exp(&mu, &x).unwrap();
            let a = closed_form_projection(&mu, &dirs, &p, 2.0).unwrap();
            let h = GeodesicSubspace { mu: mu.clone(), directions: dirs.clone() };
            let b = project_numeric(&m, &p, &h).unwrap();
            assert!((a - b.point).norm() < 1e-10);
        }
    }
}
