//! Numerical tolerances shared by the geometry and statistics layers.

/// Centralized tolerances. Defaults are the values the library is tested
/// against; experiments tighten some of them for small-scale studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Sphere radius / tangency / orthonormality checks.
    pub geometry: f64,
    /// Karcher-mean stationarity `|mean log|`.
    pub mean_stationarity: f64,
    pub mean_max_iter: usize,
    /// Maximum step halvings in the Karcher iteration.
    pub mean_max_halvings: usize,
    /// Relative eigenvalue gap below which a spectrum counts as degenerate.
    pub spectral_gap: f64,
    /// Coefficient-space distance separating distinct projection minima.
    pub projection_tie: f64,
    /// Number of starts used by the public projection routine.
    pub projection_starts: usize,
    /// Relative disagreement allowed between Richardson estimates.
    pub series_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geometry: 1e-10,
            mean_stationarity: 1e-9,
            mean_max_iter: 10_000,
            mean_max_halvings: 60,
            spectral_gap: 1e-8,
            projection_tie: 1e-6,
            projection_starts: 5,
            series_agreement: 1e-4,
        }
    }
}
