//! Experiment drivers behind the command-line tool: convergence studies of
//! the expansions, the log-normal sphere simulation, the alternative-PGA
//! comparison on rotations, and the indicator resampling study.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`): run `i` of an experiment
//! with seed `s` draws from the generator seeded with `s` on stream `i`, so
//! every run is reproducible on its own and independent of the others.

mod altpga;
mod converge;
mod indicators;
mod sphere_sim;

pub use altpga::{run_altpga, simulate_rotations, AltPgaComparison, AltPgaRow};
pub use converge::{run_converge, run_projection_study, ConvergeMode, ConvergeReport, ConvergeRow, ProjectionRow};
pub use indicators::{run_indicators, simulate_spd, CorrelationSummary, IndicatorStudy, ResampleRow};
pub use sphere_sim::{sigma_profile, simulate_sphere, SphereSimReport, SphereSimRow};

use crate::error::{PgaError, Result};
use crate::linalg::{loglog_fit, Vector};
use crate::manifold::{Frame, Manifold};
use crate::pga::TangentDataset;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Shared experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub manifold: Manifold,
    pub n_samples: usize,
    pub seed: u64,
    /// Positive and strictly increasing.
    pub eps_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub runs: usize,
    /// Center generated tangents so the data mean is exactly the base point.
    pub recenter: bool,
}

impl ExperimentConfig {
    pub fn new(manifold: Manifold, n_samples: usize, seed: u64) -> Self {
        Self {
            manifold,
            n_samples,
            seed,
            eps_grid: log_grid(10f64.powf(-2.5), 10f64.powf(-0.5), 9),
            kappa_grid: vec![1.0, 0.85, 0.7, 0.55, 0.4, 0.25, 0.1, 0.05],
            runs: 5,
            recenter: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_grid()?;
        if self.n_samples == 0 {
            return Err(PgaError::InvalidInput("n_samples must be positive".into()));
        }
        if self.runs == 0 {
            return Err(PgaError::InvalidInput("runs must be positive".into()));
        }
        if self.kappa_grid.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(PgaError::InvalidInput("kappa values must be positive".into()));
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<()> {
        if self.eps_grid.len() < 2 {
            return Err(PgaError::InsufficientGrid(self.eps_grid.len()));
        }
        if self.eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(PgaError::InvalidInput("epsilon values must be positive".into()));
        }
        if self.eps_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PgaError::InvalidInput("epsilon grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// `count` points spaced evenly in `ln` between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Generator for run `stream` of an experiment seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard deviations decreasing geometrically so that the variances span
/// `ratio : 1`.
pub fn geometric_std(dim: usize, ratio: f64) -> Vec<f64> {
    (0..dim)
        .map(|j| if dim == 1 { 1.0 } else { ratio.powf(-(j as f64) / (2.0 * (dim - 1) as f64)) })
        .collect()
}

/// `n` tangents at the base point whose coordinates are independent normals
/// with the given standard deviations, optionally centered.
pub fn anisotropic_dataset(m: Manifold, n: usize, std: &[f64], center: bool, rng: &mut ChaCha8Rng) -> Result<TangentDataset> {
    if std.len() != m.dim() {
        return Err(PgaError::DimensionMismatch(format!("{} deviations for dimension {}", std.len(), m.dim())));
    }
    let t = (0..n)
        .map(|_| {
            Vector::from_iterator(std.len(), std.iter().map(|s| {
                let z: f64 = StandardNormal.sample(rng);
                s * z
            }))
        })
        .collect();
    let ds = TangentDataset::new(Frame::new(m, m.base_point())?, t)?;
    Ok(if center { ds.centered() } else { ds })
}

/// Least-squares ln-ln fit of one quantity against epsilon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub quantity: String,
    /// 1-based direction index, when the quantity belongs to one.
    pub direction: Option<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    /// Points used in the fit.
    pub points: usize,
    /// Slope inside the window and `R^2 > 0.99`.
    pub pass: bool,
}

impl SlopeReport {
    /// Fits over the finite positive values only; `points` records how many.
    pub fn fit(quantity: &str, direction: Option<usize>, eps: &[f64], values: &[f64], window: [f64; 2]) -> Self {
        let (x, y): (Vec<f64>, Vec<f64>) =
            eps.iter().zip(values).filter(|(_, v)| v.is_finite() && **v > 0.0).map(|(e, v)| (*e, *v)).unzip();
        let (slope, intercept, r_squared) = if x.len() >= 2 {
            let f = loglog_fit(&x, &y);
            (f.slope, f.intercept, f.r_squared)
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        Self {
            quantity: quantity.to_string(),
            direction,
            slope,
            intercept,
            r_squared,
            window_lo: window[0],
            window_hi: window[1],
            points: x.len(),
            pass: slope >= window[0] && slope <= window[1] && r_squared > 0.99,
        }
    }
}
