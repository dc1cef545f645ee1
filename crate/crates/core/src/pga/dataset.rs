use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::Vector;
use crate::manifold::{intrinsic_mean_with, Frame, Manifold, Point, Sample, Tangent};

/// Riemannian logs `q_i` of a data set, stored as coordinates in the
/// orthonormal frame at the mean.
#[derive(Debug, Clone)]
pub struct TangentDataset {
    frame: Frame,
    tangents: Vec<Vector>,
}

impl TangentDataset {
    pub fn new(frame: Frame, tangents: Vec<Vector>) -> Result<Self> {
        if tangents.is_empty() {
            return Err(PgaError::InvalidInput("empty data set".into()));
        }
        let d = frame.dim();
        if let Some(t) = tangents.iter().find(|t| t.len() != d) {
            return Err(PgaError::DimensionMismatch(format!("tangent has {} coordinates, expected {d}", t.len())));
        }
        Ok(Self { frame, tangents })
    }

    /// Data given as tangent matrices at `mu`.
    pub fn from_tangents(m: Manifold, mu: Point, tangents: &[Tangent]) -> Result<Self> {
        let frame = Frame::new(m, mu)?;
        let mut coords = Vec::with_capacity(tangents.len());
        for t in tangents {
            m.check_tangent(frame.mu(), t)?;
            coords.push(frame.coords_at_mu(t));
        }
        Self::new(frame, coords)
    }

    /// Data given as points: the intrinsic mean is computed and the logs taken there.
    pub fn from_points(m: Manifold, points: &[Point], tol: &Tolerances) -> Result<Self> {
        let first = points.first().ok_or_else(|| PgaError::InvalidInput("empty data set".into()))?;
        let mean = intrinsic_mean_with(&m, points, first, tol)?;
        let frame = Frame::new(m, mean.mean)?;
        let mut coords = Vec::with_capacity(points.len());
        for p in points {
            coords.push(frame.log_coords(&frame.lift(p))?);
        }
        Self::new(frame, coords)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn manifold(&self) -> Manifold {
        self.frame.manifold()
    }

    pub fn tangents(&self) -> &[Vector] {
        &self.tangents
    }

    pub fn len(&self) -> usize {
        self.tangents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tangents.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn tangent_mean(&self) -> Vector {
        self.tangents.iter().fold(Vector::zeros(self.dim()), |a, b| a + b) / self.len() as f64
    }

    /// Subtracts the tangent mean, so `mu` is exactly the intrinsic mean of
    /// `Exp_mu(eps q_i)` for every `eps`.
    pub fn centered(&self) -> Self {
        let c = self.tangent_mean();
        Self {
            frame: self.frame.clone(),
            tangents: self.tangents.iter().map(|t| t - &c).collect(),
        }
    }

    pub fn scaled(&self, eps: f64) -> Self {
        Self {
            frame: self.frame.clone(),
            tangents: self.tangents.iter().map(|t| t * eps).collect(),
        }
    }

    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let mut t = Vec::with_capacity(idx.len());
        for &i in idx {
            t.push(
                self.tangents
                    .get(i)
                    .cloned()
                    .ok_or(PgaError::IndexOutOfRange { index: i, max: self.len() })?,
            );
        }
        Self::new(self.frame.clone(), t)
    }

    /// `Exp(q_i)` in the frame's lifted picture.
    pub fn lifted_points(&self) -> Vec<Point> {
        self.tangents.iter().map(|t| self.frame.exp_coords(t)).collect()
    }

    /// Lifted points carrying their log coordinates.
    pub fn samples(&self) -> Vec<Sample> {
        self.tangents.iter().map(|t| self.frame.sample(t)).collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.tangents.iter().map(|t| self.frame.lower(&self.frame.exp_coords(t))).collect()
    }

    /// Tangent matrices at `mu`.
    pub fn tangent_matrices(&self) -> Vec<Tangent> {
        self.tangents.iter().map(|t| self.frame.tangent_at_mu(t)).collect()
    }

    /// Tangents at the lifted base (the identity on the matrix spaces).
    pub fn lifted_tangents(&self) -> Vec<Tangent> {
        self.tangents.iter().map(|t| self.frame.tangent(t)).collect()
    }
}
