use super::{rng_for, ExperimentConfig};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::{line_angle, orthogonalize, sym_eig, Mat, Vector};
use crate::manifold::{Frame, Manifold};
use crate::pga::{covariance, exact_pga, expansion, PgaOptions, StandardAlpha, TangentDataset};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Diagonal of the sampling covariance: geometric from 1 down to `1 / ratio`.
pub fn sigma_profile(dim: usize, ratio: f64) -> Vec<f64> {
    (0..dim)
        .map(|j| if dim == 1 { 1.0 } else { ratio.powf(-(j as f64) / (dim - 1) as f64) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSimRow {
    pub kappa: f64,
    /// Mean norm of the Riemannian logs at the sample mean.
    pub m_scale: f64,
    pub est_theta0: f64,
    pub est_theta2: f64,
    pub init_theta0: f64,
    pub init_theta2: f64,
    /// Runs that completed.
    pub runs: usize,
    /// Runs dropped because a solver failed or did not converge.
    pub failed_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSimReport {
    pub n: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub variance_ratio: f64,
    pub rows: Vec<SphereSimRow>,
}

struct RunAngles {
    scale: f64,
    est0: f64,
    est2: f64,
    init0: f64,
    init2: f64,
}

fn one_run(m: Manifold, frame: &Frame, sigma: &[f64], kappa: f64, n_samples: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<RunAngles> {
    let d = m.dim();
    let points: Vec<Mat> = (0..n_samples)
        .map(|_| {
            let z = Vector::from_fn(d, |j, _| {
                let g: f64 = StandardNormal.sample(rng);
                g * (kappa * sigma[j]).sqrt()
            });
            frame.exp_coords(&z)
        })
        .collect();
    let tol = Tolerances::default();
    let ds = TangentDataset::from_points(m, &points, &tol)?;
    let k_max = d - 1;
    let cov = covariance(&ds)?;
    let exp = expansion(&ds, k_max, &StandardAlpha::default(), &tol)?;
    let pga = exact_pga(&ds, &PgaOptions::new(k_max))?;
    if pga.converged.iter().any(|c| !c) {
        return Err(PgaError::NonConvergence("exact PGA".into()));
    }
    let mut acc = [0.0; 4];
    for k in 0..k_max {
        let v = &pga.directions[k];
        let prior = &pga.directions[..k];
        acc[0] += line_angle(v, &cov.u[k]);
        let corr = exp.corrected(k, 1.0);
        acc[1] += line_angle(v, &corr);
        // PCA of the logs restricted to the complement of the directions found so far
        let mut l = Mat::zeros(d, d);
        for q in ds.tangents() {
            let r = orthogonalize(q, prior);
            l += &r * r.transpose();
        }
        let e = sym_eig(&l)?;
        let top = (0..d).max_by(|&a, &b| e.values[a].total_cmp(&e.values[b])).expect("nonempty");
        acc[2] += line_angle(v, &e.vector(top));
        acc[3] += line_angle(v, &orthogonalize(&corr, prior));
    }
    let kf = k_max as f64;
    Ok(RunAngles {
        scale: ds.tangents().iter().map(|q| q.norm()).sum::<f64>() / ds.len() as f64,
        est0: acc[0] / kf,
        est2: acc[1] / kf,
        init0: acc[2] / kf,
        init2: acc[3] / kf,
    })
}

/// Log-normal samples `Exp_mu(N(0, kappa Sigma))` on the sphere of
/// `cfg.manifold`, with `Sigma` diagonal in the frame at the base point,
/// largest eigenvalue 1 and smallest `1 / variance_ratio`. For every kappa,
/// the angles between all but the last exact PGA direction and their
/// leading/next-order estimates (at `eps = 1`) and initializations are
/// averaged over directions and runs.
pub fn simulate_sphere(cfg: &ExperimentConfig, variance_ratio: f64) -> Result<SphereSimReport> {
    cfg.validate()?;
    let m = cfg.manifold;
    let n = match m {
        Manifold::Sphere { n, .. } => n,
        other => return Err(PgaError::UnsupportedManifold(other.name())),
    };
    if n < 2 {
        return Err(PgaError::InvalidInput("the simulation needs n >= 2".into()));
    }
    if !(variance_ratio > 1.0) {
        return Err(PgaError::InvalidInput("variance ratio must exceed 1".into()));
    }
    let frame = Frame::new(m, m.base_point())?;
    let sigma = sigma_profile(m.dim(), variance_ratio);
    let mut rows = Vec::with_capacity(cfg.kappa_grid.len());
    for (ki, &kappa) in cfg.kappa_grid.iter().enumerate() {
        let mut done = Vec::new();
        let mut failed = 0;
        for run in 0..cfg.runs {
            let mut rng = rng_for(cfg.seed, (ki * cfg.runs + run) as u64);
            match one_run(m, &frame, &sigma, kappa, cfg.n_samples, &mut rng) {
                Ok(a) => done.push(a),
                Err(e) if e.is_solver_failure() => failed += 1,
                Err(e) => return Err(e),
            }
        }
        let c = done.len().max(1) as f64;
        let mean = |f: fn(&RunAngles) -> f64| if done.is_empty() { f64::NAN } else { done.iter().map(f).sum::<f64>() / c };
        rows.push(SphereSimRow {
            kappa,
            m_scale: mean(|a| a.scale),
            est_theta0: mean(|a| a.est0),
            est_theta2: mean(|a| a.est2),
            init_theta0: mean(|a| a.init0),
            init_theta2: mean(|a| a.init2),
            runs: done.len(),
            failed_runs: failed,
        });
    }
    Ok(SphereSimReport { n, n_samples: cfg.n_samples, seed: cfg.seed, variance_ratio, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_spans_ratio() {
        let s = sigma_profile(15, 20.0);
        assert_eq!(s[0], 1.0);
        assert!((s[14] - 0.05).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn small_kappa_estimates_are_accurate() {
        let mut cfg = ExperimentConfig::new(Manifold::sphere(5, 1.0).unwrap(), 60, 2);
        cfg.kappa_grid = vec![0.4, 0.05];
        cfg.runs = 2;
        let r = simulate_sphere(&cfg, 20.0).unwrap();
        let last = r.rows.last().unwrap();
        assert!(last.est_theta2 < last.est_theta0);
        assert!(last.est_theta0 < r.rows[0].est_theta0);
        assert_eq!(last.failed_runs, 0);
    }
}
