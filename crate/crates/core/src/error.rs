use thiserror::Error;

/// Errors raised by the geometry, statistics and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PgaError {
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("point lies on (or numerically at) the cut locus: {0}")]
    CutLocus(String),
    #[error("tangent vector norm {norm} exceeds injectivity radius {radius}")]
    OutOfInjectivityRadius { norm: f64, radius: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("operation not supported on {0}")]
    UnsupportedManifold(String),
    #[error("expansion order not supported: {0}")]
    UnsupportedOrder(String),
    #[error("degenerate plane (Gram determinant {0:e})")]
    DegeneratePlane(f64),
    #[error("degenerate spectrum: eigenvalue gap {gap:e} below threshold {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },
    #[error("logarithm undefined for intermediate product: {0}")]
    LogDomain(String),
    #[error("series extraction unstable: estimates {first} and {second} disagree")]
    SeriesExtractionUnstable { first: f64, second: f64 },
    #[error("epsilon grid needs at least two points, got {0}")]
    InsufficientGrid(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema violation at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl PgaError {
    /// True for failures of an iterative solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            PgaError::NonConvergence(_)
                | PgaError::SeriesExtractionUnstable { .. }
                | PgaError::DegenerateSpectrum { .. }
                | PgaError::CutLocus(_)
                | PgaError::LogDomain(_)
        )
    }
}

impl From<std::io::Error> for PgaError {
    fn from(e: std::io::Error) -> Self {
        PgaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PgaError>;
