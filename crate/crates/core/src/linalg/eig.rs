use super::{Mat, Vector};
use crate::error::{PgaError, Result};

/// Eigenpairs of a symmetric matrix.
///
/// Values are sorted by decreasing magnitude; `vectors` holds the matching
/// orthonormal eigenvectors as columns. Each eigenvector is signed so that
/// its entry of largest magnitude is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vector,
    pub vectors: Mat,
    pub sweeps: usize,
}

impl EigenPairs {
    pub fn vector(&self, k: usize) -> Vector {
        self.vectors.column(k).into_owned()
    }

    /// Smallest gap between consecutive eigenvalues (in the stored order).
    pub fn min_gap(&self) -> f64 {
        self.values
            .as_slice()
            .windows(2)
            .map(|w| (w[0] - w[1]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// True when some gap is below `rel * max|value|`.
    pub fn is_degenerate(&self, rel: f64) -> bool {
        let scale = self.values.amax();
        self.values.len() > 1 && self.min_gap() < rel * scale.max(f64::MIN_POSITIVE)
    }

    pub fn reconstruct(&self) -> Mat {
        &self.vectors * Mat::from_diagonal(&self.values) * self.vectors.transpose()
    }
}

const MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(a: &Mat) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(PgaError::DimensionMismatch(format!(
            "sym_eig needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let scale = a.norm();
    if (a - a.transpose()).norm() > 1e-10 * scale.max(1e-300) {
        return Err(PgaError::InvalidInput("sym_eig: matrix is not symmetric".into()));
    }
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = Mat::identity(n, n);
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(PgaError::NonConvergence(format!(
                "Jacobi eigensolver: off-diagonal norm {off:e} after {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .abs()
            .partial_cmp(&m[(i, i)].abs())
            .unwrap()
            .then(m[(j, j)].partial_cmp(&m[(i, i)]).unwrap())
    });
    let values = Vector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut vectors = Mat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut x = v.column(i).into_owned();
        let imax = x.iamax();
        if x[imax] < 0.0 {
            x = -x;
        }
        vectors.set_column(col, &x);
    }
    Ok(EigenPairs { values, vectors, sweeps })
}
