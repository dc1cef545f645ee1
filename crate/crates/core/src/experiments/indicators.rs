use super::{anisotropic_dataset, rng_for};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::indicators::{indicator_report, TauTildeVariant};
use crate::linalg::pearson;
use crate::manifold::{Manifold, Point};
use crate::pga::{expansion, StandardAlpha, TangentDataset};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampleRow {
    pub resample: usize,
    pub rho: f64,
    pub rho6: f64,
    pub sigma: f64,
    /// Projection-difference quantities (`P(n)` only).
    pub tau_h: Option<f64>,
    pub tau_h6: Option<f64>,
    pub tau_tilde: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub x: String,
    pub y: String,
    /// NaN when either series is constant.
    pub pearson: f64,
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorStudy {
    pub manifold: Manifold,
    pub subsample: usize,
    pub seed: u64,
    pub variant: TauTildeVariant,
    pub rows: Vec<ResampleRow>,
    pub correlations: Vec<CorrelationSummary>,
}

/// `Exp_I` of `n` anisotropic tangents on `P(n)`.
pub fn simulate_spd(m: Manifold, n: usize, std: &[f64], seed: u64) -> Result<Vec<Point>> {
    if !matches!(m, Manifold::Spd { .. }) {
        return Err(PgaError::UnsupportedManifold(m.name()));
    }
    let mut rng = rng_for(seed, 0);
    Ok(anisotropic_dataset(m, n, std, true, &mut rng)?.points())
}

fn corr(x: &str, y: &str, a: &[f64], b: &[f64]) -> CorrelationSummary {
    let p = pearson(a, b);
    CorrelationSummary { x: x.into(), y: y.into(), pearson: p.unwrap_or(f64::NAN), defined: p.is_some() }
}

/// Draws `repeats` subsamples of size `subsample` (without replacement) and
/// evaluates the first-direction indicators on each at the data's own scale.
pub fn run_indicators(
    m: Manifold,
    points: &[Point],
    subsample: usize,
    repeats: usize,
    seed: u64,
    variant: TauTildeVariant,
) -> Result<IndicatorStudy> {
    if matches!(m, Manifold::Sphere { .. }) {
        return Err(PgaError::UnsupportedManifold(m.name()));
    }
    if subsample < 2 || points.len() < subsample {
        return Err(PgaError::InvalidInput(format!(
            "need at least {subsample} points (and a subsample of at least 2), got {}",
            points.len()
        )));
    }
    let with_tau = matches!(m, Manifold::Spd { .. });
    let tol = Tolerances::default();
    let mut rows = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut rng = rng_for(seed, r as u64);
        let idx = sample(&mut rng, points.len(), subsample);
        let sub: Vec<Point> = idx.iter().map(|i| points[i].clone()).collect();
        let ds = TangentDataset::from_points(m, &sub, &tol)?;
        let spread = ds.tangents().iter().map(|q| q.norm()).fold(0.0, f64::max);
        let row = if spread < 1e-12 {
            ResampleRow {
                resample: r,
                rho: 0.0,
                rho6: 0.0,
                sigma: 0.0,
                tau_h: with_tau.then_some(0.0),
                tau_h6: with_tau.then_some(0.0),
                tau_tilde: with_tau.then_some(0.0),
            }
        } else {
            let exp = expansion(&ds, 1, &StandardAlpha::default(), &tol)?;
            let rep = indicator_report(&ds, &exp, 1.0, variant)?;
            ResampleRow {
                resample: r,
                rho: rep.rho,
                rho6: rep.rho6,
                sigma: rep.sigma,
                tau_h: with_tau.then_some(rep.tau_h),
                tau_h6: with_tau.then_some(rep.tau_h6),
                tau_tilde: with_tau.then_some(rep.tau_tilde),
            }
        };
        rows.push(row);
    }
    let col = |f: &dyn Fn(&ResampleRow) -> Option<f64>| -> Vec<f64> { rows.iter().filter_map(f).collect() };
    let rho = col(&|r| Some(r.rho));
    let mut correlations = vec![
        corr("rho6", "rho", &col(&|r| Some(r.rho6)), &rho),
        corr("sigma", "rho", &col(&|r| Some(r.sigma)), &rho),
    ];
    if with_tau {
        let tau = col(&|r| r.tau_h);
        correlations.push(corr("tau_h6", "tau_h", &col(&|r| r.tau_h6), &tau));
        correlations.push(corr("tau_tilde", "tau_h", &col(&|r| r.tau_tilde), &tau));
    }
    Ok(IndicatorStudy { manifold: m, subsample, seed, variant, rows, correlations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_gives_zero_and_undefined_correlation() {
        let m = Manifold::spd(2).unwrap();
        let pts = vec![m.base_point(); 10];
        let s = run_indicators(m, &pts, 8, 3, 1, TauTildeVariant::Component).unwrap();
        assert!(s.rows.iter().all(|r| r.rho == 0.0 && r.tau_h == Some(0.0)));
        assert!(s.correlations.iter().all(|c| !c.defined && c.pearson.is_nan()));
    }

    #[test]
    fn spd_correlations_are_strong() {
        let m = Manifold::spd(3).unwrap();
        let pts = simulate_spd(m, 36, &super::super::geometric_std(6, 20.0).iter().map(|s| s * 0.5).collect::<Vec<_>>(), 5)
            .unwrap();
        let s = run_indicators(m, &pts, 8, 20, 6, TauTildeVariant::Component).unwrap();
        for c in s.correlations.iter().filter(|c| c.x.ends_with('6')) {
            assert!(c.pearson > 0.9, "{c:?}");
        }
    }
}
