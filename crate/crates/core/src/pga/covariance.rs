use super::TangentDataset;
use crate::error::{PgaError, Result};
use crate::linalg::{sym_eig, Mat, Vector};

/// Matrix of `L(v) = (2/N) sum <q_i, v> q_i` in frame coordinates with its
/// eigenpairs `(u_k, beta_k)`, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceOperator {
    pub matrix: Mat,
    pub beta: Vector,
    pub u: Vec<Vector>,
}

pub fn covariance(ds: &TangentDataset) -> Result<CovarianceOperator> {
    if ds.len() < 2 {
        return Err(PgaError::InvalidInput("covariance needs at least two tangents".into()));
    }
    let d = ds.dim();
    let mut m = Mat::zeros(d, d);
    for q in ds.tangents() {
        m += q * q.transpose();
    }
    m *= 2.0 / ds.len() as f64;
    let e = sym_eig(&m)?;
    let mut pairs: Vec<(f64, Vector)> = (0..d).map(|k| (e.values[k], e.vector(k))).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(CovarianceOperator {
        matrix: m,
        beta: Vector::from_iterator(d, pairs.iter().map(|p| p.0)),
        u: pairs.into_iter().map(|p| p.1).collect(),
    })
}

impl CovarianceOperator {
    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// Smallest gap among the first `k + 1` eigenvalues (every pair that
    /// enters a correction coefficient for directions `0..k`).
    pub fn min_gap(&self, k: usize) -> f64 {
        let last = (k + 1).min(self.dim());
        let mut gap = f64::INFINITY;
        for i in 0..last {
            for j in (i + 1)..self.dim() {
                gap = gap.min((self.beta[i] - self.beta[j]).abs());
            }
        }
        gap
    }

    /// Fails unless every eigenvalue coupled to the first `k` directions is
    /// separated by more than `rel * beta_1`.
    pub fn require_gaps(&self, k: usize, rel: f64) -> Result<()> {
        let threshold = rel * self.beta[0].abs();
        let gap = self.min_gap(k.saturating_sub(1));
        if gap <= threshold {
            return Err(PgaError::DegenerateSpectrum { gap, threshold });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Frame, Manifold};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plane_dataset(t: Vec<Vector>) -> TangentDataset {
        let m = Manifold::sphere(2, 1.0).unwrap();
        TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), t).unwrap()
    }

    #[test]
    fn two_point_example() {
        let ds = plane_dataset(vec![Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![0.0, 2.0])]);
        let c = covariance(&ds).unwrap();
        assert!((&c.matrix - Mat::from_diagonal(&Vector::from_vec(vec![1.0, 4.0]))).norm() < 1e-15);
        assert_eq!(c.beta.as_slice(), &[4.0, 1.0]);
        assert!((c.u[0].abs() - Vector::from_vec(vec![0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn zero_data_gives_zero_operator() {
        let ds = plane_dataset(vec![Vector::zeros(2); 3]);
        assert_eq!(covariance(&ds).unwrap().matrix, Mat::zeros(2, 2));
    }

    #[test]
    fn operator_matches_definition_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let m = Manifold::spd(3).unwrap();
        let f = Frame::new(m, m.base_point()).unwrap();
        let t: Vec<Vector> = (0..20).map(|_| Vector::from_fn(6, |_, _| rng.random_range(-1.0..1.0))).collect();
        let ds = TangentDataset::new(f, t.clone()).unwrap();
        let c = covariance(&ds).unwrap();
        for _ in 0..10 {
            let v = Vector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
            let w = Vector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
            let direct = t.iter().fold(Vector::zeros(6), |a, q| a + q * (2.0 * q.dot(&v) / 20.0));
            assert!((c.apply(&v) - direct).norm() < 1e-10);
            assert!((c.apply(&v).dot(&w) - v.dot(&c.apply(&w))).abs() < 1e-10);
        }
        for k in 0..6 {
            assert!((c.apply(&c.u[k]) - &c.u[k] * c.beta[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_spectrum_is_reported() {
        let ds = plane_dataset(vec![
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![0.0, 1.0]),
        ]);
        let c = covariance(&ds).unwrap();
        assert!(matches!(c.require_gaps(1, 1e-8), Err(PgaError::DegenerateSpectrum { .. })));
    }
}
