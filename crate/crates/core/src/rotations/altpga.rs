use super::{gamma_ab, AltPgaConfig};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::{line_angle, minimize_on_sphere, Mat, MinimizeOptions, Vector};
use crate::manifold::{intrinsic_mean_with, intrinsic_variance, Frame, Manifold, Point, Sample};
use crate::pga::{covariance, exact_pga, PgaObjective, PgaOptions, TangentDataset};
use serde::{Deserialize, Serialize};

/// Diagnostics recorded after removing one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltPgaStep {
    /// Unit direction in the frame at the identity.
    pub direction: Vector,
    /// Mean squared residual of the step objective at `direction`.
    pub objective: f64,
    pub converged: bool,
    /// Angle (radians) to the k-th eigenvector of the original tangent covariance.
    pub angle_eigen: f64,
    /// Angle to the k-th PGA direction of the original data.
    pub angle_pga: f64,
    /// `|Log_I mu(D')|` of the transformed data.
    pub mean_displacement: f64,
    /// `(1/N) sum d(I, p'_i)^2` after the step.
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltPgaReport {
    pub config: AltPgaConfig,
    /// Rotation used to move the data mean to the identity (`p -> m^T p`).
    pub initial_mean: Mat,
    pub eigenvectors: Vec<Vector>,
    pub pga_directions: Vec<Vector>,
    pub steps: Vec<AltPgaStep>,
    /// The data after the last step (in the identity-centered picture).
    pub transformed: Vec<Point>,
}

/// Alternative PGA on `SO(n)`: each step finds the single geodesic through
/// the identity closest to the current data, then removes each point's
/// component along it with `gamma_{a,b}` before the next step.
pub fn alt_pga(data: &[Point], cfg: &AltPgaConfig) -> Result<AltPgaReport> {
    cfg.validate()?;
    let first = data.first().ok_or_else(|| PgaError::InvalidInput("empty data set".into()))?;
    let n = first.nrows();
    let m = Manifold::so(n)?;
    if cfg.k_max > m.dim() {
        return Err(PgaError::InvalidInput(format!("k_max must be in 1..={}", m.dim())));
    }
    let tol = Tolerances::default();
    let id = m.base_point();
    let mean = intrinsic_mean_with(&m, data, first, &tol)?.mean;
    let mut points: Vec<Point> = data.iter().map(|p| mean.transpose() * p).collect();

    let frame = Frame::new(m, id.clone())?;
    let ds0 = dataset(&frame, &points)?;
    let cov0 = covariance(&ds0)?;
    let pga = exact_pga(&ds0, &PgaOptions::new(cfg.k_max))?;

    let mut steps = Vec::with_capacity(cfg.k_max);
    for k in 0..cfg.k_max {
        let ds = dataset(&frame, &points)?;
        let samples: Vec<Sample> =
            points.iter().zip(ds.tangents()).map(|(p, q)| Sample { point: p.clone(), log: Some(q.clone()) }).collect();
        let seed = covariance(&ds)?.u[0].clone();
        let scale = ds.tangents().iter().map(|q| q.norm_squared()).sum::<f64>() / ds.len() as f64;
        let opts = MinimizeOptions { gtol: 1e-8 * scale.max(f64::MIN_POSITIVE), ..Default::default() };
        let obj = PgaObjective::new(&frame, &samples, &[]);
        let rep = minimize_on_sphere(|v: &Vector| obj.value_grad(v), &[], &seed, &opts)?;
        let mut v = rep.x;
        if v.dot(&cov0.u[k]) < 0.0 {
            v = -v;
        }
        let sols = obj.solve(&v)?;
        let vt = frame.tangent(&v);
        points = points.iter().zip(&sols).map(|(p, s)| gamma_ab(&vt, s.coeffs[0], cfg.a, p)).collect();
        let mu = intrinsic_mean_with(&m, &points, &id, &tol)?.mean;
        let mean_displacement = m.norm(&id, &m.log(&id, &mu)?)?;
        if cfg.recenter {
            points = points.iter().map(|p| mu.transpose() * p).collect();
        }
        let reconstruction_error = intrinsic_variance(&m, &id, &points)?;
        steps.push(AltPgaStep {
            angle_eigen: line_angle(&v, &cov0.u[k]),
            angle_pga: line_angle(&v, &pga.directions[k]),
            direction: v,
            objective: rep.value,
            converged: rep.converged,
            mean_displacement,
            reconstruction_error,
        });
    }
    Ok(AltPgaReport {
        config: *cfg,
        initial_mean: mean,
        eigenvectors: cov0.u.iter().take(cfg.k_max).cloned().collect(),
        pga_directions: pga.directions,
        steps,
        transformed: points,
    })
}

fn dataset(frame: &Frame, points: &[Point]) -> Result<TangentDataset> {
    let t = points.iter().map(|p| frame.log_coords(p)).collect::<Result<Vec<_>>>()?;
    TangentDataset::new(frame.clone(), t)
}
