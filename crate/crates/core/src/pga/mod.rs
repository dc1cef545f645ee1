//! Tangent PCA, exact PGA and the second-order expansion of PGA directions
//! in the scale of the data.
//!
//! Directions and tangents are coordinate vectors in the orthonormal
//! [`Frame`](crate::manifold::Frame) of the data set.

mod covariance;
mod dataset;
mod exact;
mod expansion;
mod series;

pub use covariance::{covariance, CovarianceOperator};
pub use dataset::TangentDataset;
pub use exact::{exact_pga, PgaObjective, PgaOptions, PgaResult, SeedKind};
pub use expansion::{
    expansion, expansion_with, numeric_alpha_row, AlphaProvider, ExpansionResult, NumericAlpha, StandardAlpha,
};
pub use series::{extract, numeric_f4, objective_series, richardson, Ladder};
