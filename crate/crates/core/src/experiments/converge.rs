use super::{anisotropic_dataset, geometric_std, rng_for, ExperimentConfig, SlopeReport};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::{line_angle, Vector};
use crate::manifold::{solve_coefficients, Frame, Manifold};
use crate::pga::{exact_pga, expansion, PgaOptions, StandardAlpha};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Variance ratio between the first and last coordinate of generated data.
const VARIANCE_RATIO: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergeMode {
    /// PGA directions against their leading and corrected approximations.
    Directions,
    /// Projection coefficients against their cubic series.
    Projection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeRow {
    pub eps: f64,
    /// 1-based direction index.
    pub direction: usize,
    /// Angle between `v_k(eps)` and `u_k`.
    pub angle_leading: f64,
    /// Angle between `v_k(eps)` and the normalized `u_k + v_{k,2} eps^2`.
    pub angle_corrected: f64,
    /// `"ok"` or the failure message.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub instance: usize,
    pub eps: f64,
    pub t_exact: f64,
    pub t1: f64,
    pub t3: f64,
    /// `|t_exact - t1 eps - t3 eps^3|`.
    pub remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeReport {
    pub manifold: Manifold,
    pub mode: ConvergeMode,
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    pub rows: Vec<ConvergeRow>,
    pub projection_rows: Vec<ProjectionRow>,
    pub slopes: Vec<SlopeReport>,
}

/// Convergence study of the direction expansions for the 1-based
/// directions `ks` on anisotropic data (variances spanning 20:1).
pub fn run_converge(cfg: &ExperimentConfig, ks: &[usize]) -> Result<ConvergeReport> {
    cfg.validate()?;
    let m = cfg.manifold;
    let k_max = *ks.iter().max().ok_or_else(|| PgaError::InvalidInput("no directions requested".into()))?;
    if ks.contains(&0) || k_max > m.dim() {
        return Err(PgaError::IndexOutOfRange { index: k_max, max: m.dim() });
    }
    let mut rng = rng_for(cfg.seed, 0);
    let ds = anisotropic_dataset(m, cfg.n_samples, &geometric_std(m.dim(), VARIANCE_RATIO), cfg.recenter, &mut rng)?;
    let tol = Tolerances::default();
    let exp = expansion(&ds, k_max, &StandardAlpha::default(), &tol)?;

    let mut rows = Vec::new();
    for &e in &cfg.eps_grid {
        let scaled = ds.scaled(e);
        let mut opts = PgaOptions::new(k_max);
        opts.seeds = Some((0..k_max).map(|k| exp.corrected(k, e)).collect());
        opts.minimize.gtol = 1e-14;
        match exact_pga(&scaled, &opts) {
            Ok(res) => {
                for &k in ks {
                    let v = &res.directions[k - 1];
                    let ok = res.converged[k - 1];
                    rows.push(ConvergeRow {
                        eps: e,
                        direction: k,
                        angle_leading: line_angle(v, &exp.u[k - 1]),
                        angle_corrected: line_angle(v, &exp.corrected(k - 1, e)),
                        status: if ok { "ok".into() } else { "not converged".into() },
                    });
                }
            }
            Err(err) => {
                for &k in ks {
                    rows.push(ConvergeRow {
                        eps: e,
                        direction: k,
                        angle_leading: f64::NAN,
                        angle_corrected: f64::NAN,
                        status: err.to_string(),
                    });
                }
            }
        }
    }
    let mut slopes = Vec::new();
    for &k in ks {
        let sel: Vec<&ConvergeRow> = rows.iter().filter(|r| r.direction == k && r.status == "ok").collect();
        let eps: Vec<f64> = sel.iter().map(|r| r.eps).collect();
        let a: Vec<f64> = sel.iter().map(|r| r.angle_leading).collect();
        let b: Vec<f64> = sel.iter().map(|r| r.angle_corrected).collect();
        slopes.push(SlopeReport::fit("angle_leading", Some(k), &eps, &a, [1.8, 2.2]));
        slopes.push(SlopeReport::fit("angle_corrected", Some(k), &eps, &b, [3.6, 4.4]));
    }
    Ok(ConvergeReport {
        manifold: m,
        mode: ConvergeMode::Directions,
        seed: cfg.seed,
        eps_grid: cfg.eps_grid.clone(),
        rows,
        projection_rows: Vec::new(),
        slopes,
    })
}

/// `(t_1, t_3)` of the first coefficient for the projection onto the
/// geodesic subspace spanned by `dirs` (frame coordinates at the identity
/// or at the sphere's base point).
pub(crate) fn series_coeffs(frame: &Frame, q: &Vector, dirs: &[Vector]) -> Result<(f64, f64)> {
    match frame.manifold() {
        Manifold::Sphere { r, .. } => crate::sphere::projection_coeff_series(q, dirs, 0, r),
        Manifold::Spd { .. } | Manifold::So { .. } => {
            if dirs.len() != 1 {
                return Err(PgaError::UnsupportedOrder("matrix-space projection series for a single geodesic only".into()));
            }
            let (qm, vm) = (frame.tangent(q), frame.tangent(&dirs[0]));
            Ok(match frame.manifold() {
                Manifold::Spd { .. } => crate::spd::projection_coeff_series(&qm, &vm),
                _ => crate::rotations::projection_coeff_series(&qm, &vm),
            })
        }
    }
}

/// Remainder of the projection-coefficient series on `n_samples` random
/// instances: unit `q`, and `k` random orthonormal directions (`k = 1` on
/// the matrix spaces).
pub fn run_projection_study(cfg: &ExperimentConfig, k: usize) -> Result<ConvergeReport> {
    cfg.validate()?;
    let m = cfg.manifold;
    if k == 0 || k > m.dim() {
        return Err(PgaError::IndexOutOfRange { index: k, max: m.dim() });
    }
    let frame = Frame::new(m, m.base_point())?;
    let d = m.dim();
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for inst in 0..cfg.n_samples {
        let mut rng = rng_for(cfg.seed, inst as u64);
        let mut gauss = || Vector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
        let q = gauss().normalize();
        let mut dirs: Vec<Vector> = Vec::with_capacity(k);
        while dirs.len() < k {
            let w = crate::linalg::orthogonalize(&gauss(), &dirs);
            if w.norm() > 1e-6 {
                dirs.push(w.normalize());
            }
        }
        let (t1, t3) = series_coeffs(&frame, &q, &dirs)?;
        let mut rem = Vec::with_capacity(cfg.eps_grid.len());
        for &e in &cfg.eps_grid {
            let s = frame.sample(&(&q * e));
            let sol = solve_coefficients(&frame, &dirs, &s, None)?;
            if !sol.converged {
                return Err(PgaError::NonConvergence(format!("projection of instance {inst} at eps {e}")));
            }
            let t = sol.coeffs[0];
            let r = (t - t1 * e - t3 * e.powi(3)).abs();
            rem.push(r);
            rows.push(ProjectionRow { instance: inst, eps: e, t_exact: t, t1, t3, remainder: r });
        }
        slopes.push(SlopeReport::fit("projection_remainder", None, &cfg.eps_grid, &rem, [4.7, 5.3]));
    }
    Ok(ConvergeReport {
        manifold: m,
        mode: ConvergeMode::Projection,
        seed: cfg.seed,
        eps_grid: cfg.eps_grid.clone(),
        rows: Vec::new(),
        projection_rows: rows,
        slopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_grid_is_rejected() {
        let mut cfg = ExperimentConfig::new(Manifold::sphere(4, 1.0).unwrap(), 10, 1);
        cfg.eps_grid = vec![0.1];
        assert_eq!(run_converge(&cfg, &[1]), Err(PgaError::InsufficientGrid(1)));
    }

    #[test]
    fn small_sphere_study_has_expected_orders() {
        let mut cfg = ExperimentConfig::new(Manifold::sphere(4, 1.0).unwrap(), 30, 11);
        cfg.eps_grid = super::super::log_grid(0.01, 0.2, 5);
        let r = run_converge(&cfg, &[1, 2]).unwrap();
        for s in &r.slopes {
            assert!(s.pass, "{s:?}");
        }
    }

    #[test]
    fn so3_projection_remainder_is_fifth_order() {
        let mut cfg = ExperimentConfig::new(Manifold::so(3).unwrap(), 5, 3);
        cfg.eps_grid = super::super::log_grid(0.01, 0.3, 6);
        let r = run_projection_study(&cfg, 1).unwrap();
        for s in &r.slopes {
            assert!(s.pass, "{s:?}");
        }
    }
}
