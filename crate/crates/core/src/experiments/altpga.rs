use super::{anisotropic_dataset, rng_for};
use crate::error::{PgaError, Result};
use crate::manifold::{Manifold, Point};
use crate::rotations::{alt_pga, AltPgaConfig, AltPgaReport, Split};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltPgaRow {
    pub split: Split,
    /// 1-based direction index.
    pub direction: usize,
    pub angle_eigen: f64,
    pub angle_pga: f64,
    pub mean_displacement: f64,
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltPgaComparison {
    pub n_points: usize,
    pub rows: Vec<AltPgaRow>,
    pub reports: Vec<AltPgaReport>,
}

/// `Exp_I` of `n` tangents with independent normal coordinates of the given
/// standard deviations.
pub fn simulate_rotations(m: Manifold, n: usize, std: &[f64], seed: u64) -> Result<Vec<Point>> {
    if !matches!(m, Manifold::So { .. }) {
        return Err(PgaError::UnsupportedManifold(m.name()));
    }
    let mut rng = rng_for(seed, 0);
    let ds = anisotropic_dataset(m, n, std, false, &mut rng)?;
    Ok(ds.points())
}

/// Runs alternative PGA with the requested splits (both when `None`).
pub fn run_altpga(points: &[Point], k_max: usize, split: Option<Split>, recenter: bool) -> Result<AltPgaComparison> {
    let splits = match split {
        Some(s) => vec![s],
        None => vec![Split::Half, Split::Left],
    };
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for s in splits {
        let mut cfg = match s {
            Split::Half => AltPgaConfig::half(k_max),
            Split::Left => AltPgaConfig::left(k_max),
        };
        cfg.recenter = recenter;
        let rep = alt_pga(points, &cfg)?;
        for (k, st) in rep.steps.iter().enumerate() {
            rows.push(AltPgaRow {
                split: s,
                direction: k + 1,
                angle_eigen: st.angle_eigen,
                angle_pga: st.angle_pga,
                mean_displacement: st.mean_displacement,
                reconstruction_error: st.reconstruction_error,
            });
        }
        reports.push(rep);
    }
    Ok(AltPgaComparison { n_points: points.len(), rows, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hat3, mat_exp};

    #[test]
    fn single_geodesic_has_no_displacement() {
        let v = hat3([0.6, 0.0, 0.8]);
        let pts: Vec<Point> = [-0.4, -0.1, 0.2, 0.3].iter().map(|&s| mat_exp(&(&v * s))).collect();
        let r = run_altpga(&pts, 1, None, false).unwrap();
        assert_eq!(r.rows.len(), 2);
        for row in &r.rows {
            assert!(row.mean_displacement < 1e-9 && row.reconstruction_error < 1e-18);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = Manifold::so(3).unwrap();
        let a = simulate_rotations(m, 5, &[0.5, 0.3, 0.1], 4).unwrap();
        let b = simulate_rotations(m, 5, &[0.5, 0.3, 0.1], 4).unwrap();
        assert_eq!(a, b);
    }
}
