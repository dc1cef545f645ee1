//! Differences between exact and tangent-space PGA at a given data scale:
//! the average projection difference `tau_H`, the average residual
//! difference `rho`, their pre-computable indicators `tau_tilde` and
//! `sigma`, and the leading `eps^6` coefficients of `tau_H` and `rho` on
//! `P(n)` and `SO(n)` for the first direction.

use crate::error::{PgaError, Result};
use crate::linalg::{dexp, dexp_symmetric, skew_part, sym_part, trace_prod, Mat, Vector};
use crate::manifold::{solve_coefficients, Frame, Manifold};
use crate::pga::{covariance, exact_pga, ExpansionResult, PgaObjective, PgaOptions, TangentDataset};
use crate::spd::coeff_series_signed;
use serde::{Deserialize, Serialize};

/// Which norm of the distance gradient at the linear projection enters `tau_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauTildeVariant {
    /// Component tangent to `H`: `(2/N) sum |grad_H f|`.
    #[default]
    Component,
    /// Full gradient norm `2 d(p_i, pi_hat(p_i))`: `(2/N) sum |grad f|`.
    Full,
    /// `(1/N) sum |grad_H f|^2 / 4`, the squared-norm (Pythagorean) estimate of `tau_H`.
    Squared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub epsilon: f64,
    pub tau_h: f64,
    pub tau_tilde: f64,
    pub rho: f64,
    pub sigma: f64,
    /// Predicted `tau_H / eps^6`.
    pub tau_h6: f64,
    /// Predicted `rho / eps^6`.
    pub rho6: f64,
}

fn check_dirs(ds: &TangentDataset, dirs: &[Vector]) -> Result<()> {
    if dirs.is_empty() {
        return Err(PgaError::InvalidInput("at least one direction is required".into()));
    }
    if dirs.iter().any(|d| d.len() != ds.dim()) {
        return Err(PgaError::DimensionMismatch("direction length differs from the data dimension".into()));
    }
    Ok(())
}

/// Coefficients of the tangent-space orthogonal projection of `q` onto `dirs`.
fn linear_coeffs(q: &Vector, dirs: &[Vector]) -> Vector {
    Vector::from_iterator(dirs.len(), dirs.iter().map(|d| q.dot(d)))
}

fn combine(dirs: &[Vector], s: &Vector) -> Vector {
    dirs.iter().zip(s.iter()).fold(Vector::zeros(dirs[0].len()), |acc, (d, &c)| acc + d * c)
}

/// `(1/N) sum d(p_i, pi_hat(p_i))^2 - d(p_i, pi(p_i))^2` for `H` spanned by
/// the orthonormal coordinate directions `dirs` at the data mean.
pub fn tau_h(ds: &TangentDataset, dirs: &[Vector]) -> Result<f64> {
    check_dirs(ds, dirs)?;
    let frame = ds.frame();
    let mut acc = 0.0;
    for s in ds.samples() {
        let q = s.log.as_ref().expect("dataset samples carry their logs");
        let lin = linear_coeffs(q, dirs);
        let (d_hat, _) = frame.sqdist_grad_sample(&combine(dirs, &lin), &s)?;
        let exact = solve_coefficients(frame, dirs, &s, Some(&lin))?;
        if !exact.converged {
            return Err(PgaError::NonConvergence("projection did not converge".into()));
        }
        acc += d_hat - exact.sqdist;
    }
    Ok(acc / ds.len() as f64)
}

/// Gram matrix of `dExp_S(d_j)` in the metric at `Exp(S)`.
fn exp_gram(frame: &Frame, s: &Vector, dirs: &[Vector]) -> Result<Mat> {
    let x = frame.tangent(s);
    let imgs: Vec<Mat> = match frame.manifold() {
        Manifold::Sphere { r, .. } => {
            let mu = frame.mu();
            let a = x.norm();
            dirs.iter()
                .map(|d| {
                    let w = frame.tangent(d);
                    if a == 0.0 {
                        return w;
                    }
                    let u = &x / a;
                    let uw = u.dot(&w);
                    let (sn, cs) = (a / r).sin_cos();
                    mu * (-sn / r * uw) + &u * (cs * uw) + (&w - &u * uw) * (r * sn / a)
                })
                .collect()
        }
        Manifold::Spd { .. } => {
            let xs = sym_part(&x);
            dirs.iter().map(|d| dexp_symmetric(&xs, &frame.tangent(d))).collect()
        }
        Manifold::So { .. } => {
            let xs = skew_part(&x);
            dirs.iter().map(|d| dexp(&xs, &frame.tangent(d))).collect()
        }
    };
    let y = frame.exp_coords(s);
    let k = dirs.len();
    let mut g = Mat::zeros(k, k);
    let yinv = match frame.manifold() {
        Manifold::Sphere { .. } => None,
        Manifold::Spd { .. } => Some(y.clone().try_inverse().ok_or(PgaError::NotPositiveDefinite(0.0))?),
        Manifold::So { .. } => Some(y.transpose()),
    };
    for i in 0..k {
        for j in 0..=i {
            let v = match (&yinv, frame.manifold()) {
                (None, _) => imgs[i].dot(&imgs[j]),
                (Some(yi), Manifold::Spd { .. }) => 0.5 * trace_prod(&(yi * &imgs[i]), &(yi * &imgs[j])),
                (Some(yi), _) => 0.5 * (yi * &imgs[i]).dot(&(yi * &imgs[j])),
            };
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Indicator of `tau_H` from the gradient of `y -> d(p_i, y)^2` at the
/// linear projections.
pub fn tau_tilde(ds: &TangentDataset, dirs: &[Vector], variant: TauTildeVariant) -> Result<f64> {
    check_dirs(ds, dirs)?;
    let frame = ds.frame();
    let mut acc = 0.0;
    for s in ds.samples() {
        let q = s.log.as_ref().expect("dataset samples carry their logs");
        let lin = combine(dirs, &linear_coeffs(q, dirs));
        let (d2, g) = frame.sqdist_grad_sample(&lin, &s)?;
        let term = match variant {
            TauTildeVariant::Full => 2.0 * d2.sqrt(),
            TauTildeVariant::Component | TauTildeVariant::Squared => {
                let gh = Vector::from_iterator(dirs.len(), dirs.iter().map(|d| g.dot(d)));
                let j = exp_gram(frame, &lin, dirs)?;
                let sol = j
                    .clone()
                    .cholesky()
                    .ok_or_else(|| PgaError::CutLocus("exponential map is singular at the projection".into()))?
                    .solve(&gh);
                let sq = gh.dot(&sol).max(0.0);
                match variant {
                    TauTildeVariant::Squared => sq / 4.0,
                    _ => 2.0 * sq.sqrt(),
                }
            }
        };
        acc += term;
    }
    Ok(acc / ds.len() as f64)
}

/// `(1/N) sum d(p_i, pi_{H(v_hat)}(p_i))^2 - d(p_i, pi_{H(v)}(p_i))^2` with
/// `H(w)` spanned by `prior` and `w`.
pub fn rho(ds: &TangentDataset, v_hat: &Vector, v: &Vector, prior: &[Vector]) -> Result<f64> {
    check_dirs(ds, std::slice::from_ref(v_hat))?;
    check_dirs(ds, std::slice::from_ref(v))?;
    let pts = ds.samples();
    let a = PgaObjective::new(ds.frame(), &pts, prior).value(v_hat)?;
    let b = PgaObjective::new(ds.frame(), &pts, prior).value(v)?;
    Ok(a - b)
}

/// Standard deviation over the data of `|q_i - s_i| - d(p_i, Exp(s_i))`,
/// `s_i` the tangent projection of `q_i` onto `span(prior, v_hat)`.
pub fn sigma_indicator(ds: &TangentDataset, v_hat: &Vector, prior: &[Vector]) -> Result<f64> {
    let mut dirs = prior.to_vec();
    dirs.push(v_hat.clone());
    check_dirs(ds, &dirs)?;
    let frame = ds.frame();
    let mut diffs = Vec::with_capacity(ds.len());
    for s in ds.samples() {
        let q = s.log.as_ref().expect("dataset samples carry their logs");
        let lin = combine(&dirs, &linear_coeffs(q, &dirs));
        let (d2, _) = frame.sqdist_grad_sample(&lin, &s)?;
        diffs.push((q - &lin).norm() - d2.sqrt());
    }
    let n = diffs.len() as f64;
    let m = diffs.iter().sum::<f64>() / n;
    Ok((diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / n).sqrt())
}

fn matrix_sign(m: Manifold) -> Result<f64> {
    match m {
        Manifold::Spd { .. } => Ok(1.0),
        Manifold::So { .. } => Ok(-1.0),
        Manifold::Sphere { .. } => Err(PgaError::UnsupportedManifold(m.name())),
    }
}

/// `(1/N) sum t_{i,3}^2` for the geodesic `H(v)`.
pub fn tau_h6(ds: &TangentDataset, v: &Vector) -> Result<f64> {
    let sign = matrix_sign(ds.manifold())?;
    check_dirs(ds, std::slice::from_ref(v))?;
    let vm = ds.frame().tangent(v);
    let s: f64 = ds.lifted_tangents().iter().map(|q| coeff_series_signed(sign, q, &vm).1.powi(2)).sum();
    Ok(s / ds.len() as f64)
}

/// `eps^6` coefficient of `rho` for the first direction: the change of the
/// quadratic objective term along `v_{1,2}` plus that of the quartic term.
pub fn rho6(ds: &TangentDataset, exp: &ExpansionResult) -> Result<f64> {
    let sign = matrix_sign(ds.manifold())?;
    let n = ds.len() as f64;
    let v0 = &exp.u[0];
    let v2 = exp.second_order(0);
    let quad: f64 = ds
        .tangents()
        .iter()
        .map(|q| q.dot(&v2).powi(2) - q.dot(v0).powi(2) * v2.norm_squared())
        .sum::<f64>()
        / n;
    let f = ds.frame();
    let (a, b) = (f.tangent(v0), f.tangent(&v2));
    let quart: f64 = ds
        .lifted_tangents()
        .iter()
        .map(|q| {
            let qa = q * &a;
            let qb = q * &b;
            let qq = q * q;
            let ta = qa.trace();
            ta * ta * (2.0 * trace_prod(&qa, &qb) - trace_prod(&qq, &(&a * &b)) - trace_prod(&qq, &(&b * &a)))
                + 2.0 * ta * qb.trace() * (trace_prod(&qa, &qa) - trace_prod(&qq, &(&a * &a)))
        })
        .sum::<f64>()
        * sign
        / (48.0 * n);
    Ok(quad + quart)
}

/// All indicators for the first direction of `ds` scaled by `eps`:
/// `v` is the exact first PGA direction at that scale, `v_hat = u_1`.
pub fn indicator_report(ds: &TangentDataset, exp: &ExpansionResult, eps: f64, variant: TauTildeVariant) -> Result<IndicatorReport> {
    let scaled = ds.scaled(eps);
    let u0 = covariance(&scaled)?.u[0].clone();
    let mut opts = PgaOptions::new(1);
    opts.minimize.gtol = 1e-12;
    let v = exact_pga(&scaled, &opts)?.directions[0].clone();
    let vh = if u0.dot(&exp.u[0]) < 0.0 { -u0 } else { u0 };
    Ok(IndicatorReport {
        epsilon: eps,
        tau_h: tau_h(&scaled, std::slice::from_ref(&v))?,
        tau_tilde: tau_tilde(&scaled, std::slice::from_ref(&v), variant)?,
        rho: rho(&scaled, &vh, &v, &[])?,
        sigma: sigma_indicator(&scaled, &vh, &[])?,
        tau_h6: tau_h6(ds, &exp.u[0])?,
        rho6: rho6(ds, exp)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::linalg::loglog_fit;
    use crate::pga::{expansion, StandardAlpha};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn anisotropic(m: Manifold, n: usize, seed: u64) -> TangentDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = m.dim();
        let t = (0..n)
            .map(|_| Vector::from_fn(d, |i, _| rng.random_range(-1.0..1.0) * 0.8f64.powi(i as i32 * 2)))
            .collect();
        TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), t).unwrap().centered()
    }

    fn e(d: usize, i: usize) -> Vector {
        Vector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn data_on_subspace_gives_zero() {
        for m in [Manifold::sphere(3, 2.0).unwrap(), Manifold::spd(2).unwrap(), Manifold::so(3).unwrap()] {
            let d = m.dim();
            let t: Vec<Vector> = [0.3, -0.2, 0.05].iter().map(|&s| &e(d, 0) * s + &e(d, 1) * (0.5 * s * s)).collect();
            let ds = TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), t).unwrap();
            let dirs = [e(d, 0), e(d, 1)];
            assert!(tau_h(&ds, &dirs).unwrap().abs() < 1e-15, "{}", m.name());
            for v in [TauTildeVariant::Component, TauTildeVariant::Full, TauTildeVariant::Squared] {
                assert!(tau_tilde(&ds, &dirs, v).unwrap() < 1e-7, "{}", m.name());
            }
            assert!(sigma_indicator(&ds, &dirs[1], &dirs[..1]).unwrap() < 1e-8);
        }
    }

    #[test]
    fn single_point_gradient_component() {
        for m in [Manifold::sphere(3, 1.0).unwrap(), Manifold::spd(3).unwrap(), Manifold::so(3).unwrap()] {
            let d = m.dim();
            let q = Vector::from_fn(d, |i, _| 0.4 / (1.0 + i as f64));
            let ds = TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), vec![q.clone()]).unwrap();
            let v = Vector::from_fn(d, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 }).normalize();
            let s0 = q.dot(&v);
            let sample = ds.samples().remove(0);
            let h = 1e-6;
            let f = |s: f64| ds.frame().sqdist_grad_sample(&(&v * s), &sample).unwrap().0;
            let fd = (f(s0 + h) - f(s0 - h)) / (2.0 * h);
            let got = tau_tilde(&ds, std::slice::from_ref(&v), TauTildeVariant::Component).unwrap();
            assert!((got - 2.0 * fd.abs()).abs() < 1e-7, "{}: {got} vs {}", m.name(), 2.0 * fd.abs());
            assert_eq!(sigma_indicator(&ds, &v, &[]).unwrap(), 0.0);
        }
    }

    #[test]
    fn spd_tau_matches_objective_definition() {
        let ds = anisotropic(Manifold::spd(2).unwrap(), 6, 3).scaled(0.4);
        let v = e(3, 0);
        let vm = ds.frame().tangent(&v);
        let mut want = 0.0;
        for q in ds.lifted_tangents() {
            let t1 = crate::spd::inner(1.0, &q, &vm);
            // Newton on dh/ds with central-difference second derivative
            let mut s = t1;
            for _ in 0..50 {
                let g = crate::spd::projection_objective_ds(&vm, &q, s, 1.0).unwrap();
                let hh = 1e-5;
                let g2 = (crate::spd::projection_objective_ds(&vm, &q, s + hh, 1.0).unwrap()
                    - crate::spd::projection_objective_ds(&vm, &q, s - hh, 1.0).unwrap())
                    / (2.0 * hh);
                s -= g / g2;
            }
            want += crate::spd::projection_objective(&vm, &q, t1, 1.0).unwrap()
                - crate::spd::projection_objective(&vm, &q, s, 1.0).unwrap();
        }
        want /= ds.len() as f64;
        let got = tau_h(&ds, &[v]).unwrap();
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
    }

    #[test]
    fn rho_trivial_cases() {
        let ds = anisotropic(Manifold::so(3).unwrap(), 10, 4);
        let v = e(3, 1);
        assert_eq!(rho(&ds, &v, &v, &[]).unwrap(), 0.0);
    }

    #[test]
    fn commuting_data_has_zero_coefficients() {
        let m = Manifold::spd(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // diagonal coordinates only
        let t = (0..12)
            .map(|_| Vector::from_fn(6, |i, _| if i < 3 { rng.random_range(-1.0..1.0) / (1.0 + i as f64) } else { 0.0 }))
            .collect();
        let ds = TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), t).unwrap().centered();
        let exp = expansion(&ds, 1, &StandardAlpha::default(), &Tolerances::default()).unwrap();
        assert!(tau_h6(&ds, &exp.u[0]).unwrap().abs() < 1e-30);
        assert!(rho6(&ds, &exp).unwrap().abs() < 1e-25);
    }

    #[test]
    fn sphere_coefficients_unsupported() {
        let ds = anisotropic(Manifold::sphere(3, 1.0).unwrap(), 6, 6);
        assert!(matches!(tau_h6(&ds, &e(3, 0)), Err(PgaError::UnsupportedManifold(_))));
    }

    #[test]
    fn coefficients_predict_small_scale_values() {
        for (m, seed) in [(Manifold::spd(3).unwrap(), 7), (Manifold::so(3).unwrap(), 8)] {
            let ds = anisotropic(m, 20, seed);
            let exp = expansion(&ds, 1, &StandardAlpha::default(), &Tolerances::default()).unwrap();
            let eps = [0.2, 0.1, 0.05, 0.02];
            let reps: Vec<IndicatorReport> =
                eps.iter().map(|&x| indicator_report(&ds, &exp, x, TauTildeVariant::Component).unwrap()).collect();
            let r = &reps[2];
            let e6 = 0.05f64.powi(6);
            assert!((r.tau_h / e6 / r.tau_h6 - 1.0).abs() < 0.05, "{}: tau {} vs {}", m.name(), r.tau_h / e6, r.tau_h6);
            assert!((r.rho / e6 / r.rho6 - 1.0).abs() < 0.05, "{}: rho {} vs {}", m.name(), r.rho / e6, r.rho6);
            for r in &reps {
                assert!(r.tau_h >= 0.0 && r.rho >= -1e-9);
            }
            let tau: Vec<f64> = reps.iter().map(|r| r.tau_h).collect();
            let rh: Vec<f64> = reps.iter().map(|r| r.rho).collect();
            for ys in [tau, rh] {
                let s = loglog_fit(&eps, &ys).slope;
                assert!((5.6..=6.4).contains(&s), "{}: slope {s}", m.name());
            }
        }
    }
}
