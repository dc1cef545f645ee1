//! Principal geodesic analysis (PGA) on the n-sphere, positive-definite
//! matrices and the special orthogonal group, with second-order scale and
//! curvature expansions of PGA directions and linear-difference indicators.

pub mod config;
pub mod error;
pub mod experiments;
pub mod indicators;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod pga;
pub mod rotations;
pub mod spd;
pub mod sphere;

pub use config::Tolerances;
pub use error::{PgaError, Result};
pub use manifold::{Frame, GeodesicSubspace, Manifold, Point, Tangent};
