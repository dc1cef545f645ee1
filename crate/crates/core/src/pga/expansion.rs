use super::{covariance, extract, CovarianceOperator, Ladder, PgaObjective, TangentDataset};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::{Mat, Vector};
use crate::manifold::Manifold;
use serde::{Deserialize, Serialize};

/// Source of the coefficients `alpha_{k,j}`: one row `(alpha_{k,0}, .., alpha_{k,K-1})`
/// per 0-based direction `k`; only entries `j > k` are used.
pub trait AlphaProvider {
    fn alpha_row(&self, ds: &TangentDataset, cov: &CovarianceOperator, k: usize) -> Result<Vector>;
}

/// Closed forms where they exist (sphere: every `k`; `P(n)`, `SO(n)`:
/// `k = 0`) and series extraction for the second direction on the matrix spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardAlpha {
    pub ladder: Ladder,
    pub agreement: f64,
}

impl Default for StandardAlpha {
    fn default() -> Self {
        Self { ladder: Ladder::PRIMARY, agreement: Tolerances::default().series_agreement }
    }
}

impl AlphaProvider for StandardAlpha {
    fn alpha_row(&self, ds: &TangentDataset, cov: &CovarianceOperator, k: usize) -> Result<Vector> {
        let d = cov.dim();
        match ds.manifold() {
            Manifold::Sphere { r, .. } => {
                let mut row = Vector::zeros(d);
                for j in (k + 1)..d {
                    row[j] = crate::sphere::alpha_sphere(ds.tangents(), &cov.u, k, j, r)?;
                }
                Ok(row)
            }
            m => match k {
                0 => {
                    let sign = if matches!(m, Manifold::Spd { .. }) { 1.0 } else { -1.0 };
                    let qs = ds.lifted_tangents();
                    let f = ds.frame();
                    let u0 = f.tangent(&cov.u[0]);
                    let mut row = Vector::zeros(d);
                    for j in 1..d {
                        row[j] = crate::spd::alpha1_signed(sign, &qs, &u0, &f.tangent(&cov.u[j]));
                    }
                    Ok(row)
                }
                1 => numeric_alpha_row(ds, &cov.u, 1, &self.ladder, self.agreement),
                _ => Err(PgaError::UnsupportedOrder(format!(
                    "direction {} on {} has no expansion coefficients",
                    k + 1,
                    m.name()
                ))),
            },
        }
    }
}

/// Series extraction for any space and any `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericAlpha {
    pub ladder: Ladder,
    pub agreement: f64,
}

impl AlphaProvider for NumericAlpha {
    fn alpha_row(&self, ds: &TangentDataset, cov: &CovarianceOperator, k: usize) -> Result<Vector> {
        numeric_alpha_row(ds, &cov.u, k, &self.ladder, self.agreement)
    }
}

/// `alpha_{k,j}` for all `j` from the gradient of the exact `k`-th objective
/// at `v = u_k` with priors `u_0..u_{k-1}`: the gradient is `alpha_k eps^4 +
/// O(eps^6)` off the span of `u_0..u_k`, and the leading coefficient is
/// extracted over the ladder. Entries `j <= k` are zero.
pub fn numeric_alpha_row(ds: &TangentDataset, u: &[Vector], k: usize, ladder: &Ladder, agreement: f64) -> Result<Vector> {
    if k >= u.len() {
        return Err(PgaError::IndexOutOfRange { index: k, max: u.len() });
    }
    let d = u.len();
    let coords = extract(
        |e| {
            let pts = ds.scaled(e).samples();
            let obj = PgaObjective::new(ds.frame(), &pts, &u[..k]);
            let (_, g) = obj.value_grad(&u[k])?;
            let e4 = e.powi(4);
            Ok(Vector::from_iterator(
                d,
                (0..d).map(|j| if j <= k { 0.0 } else { g.dot(&u[j]) / e4 }),
            ))
        },
        ladder,
        2,
        agreement,
    )?;
    Ok(coords)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub u: Vec<Vector>,
    pub beta: Vector,
    /// Rows `0..k_max` of `alpha_{k,j}` (entries `j > k`).
    pub alpha: Mat,
    /// Skew-symmetric correction matrix; entries with both indices at or
    /// beyond `k_max` are not needed and left zero.
    pub c: Mat,
    pub k_max: usize,
}

impl ExpansionResult {
    /// `v_{k,2} = sum_j c_{k,j} u_j`.
    pub fn second_order(&self, k: usize) -> Vector {
        let mut out = Vector::zeros(self.beta.len());
        for (j, uj) in self.u.iter().enumerate() {
            out += uj * self.c[(k, j)];
        }
        out
    }

    /// `u_k + v_{k,2} eps^2` without normalization.
    pub fn corrected_raw(&self, k: usize, eps: f64) -> Vector {
        &self.u[k] + self.second_order(k) * (eps * eps)
    }

    /// Unit-length corrected direction.
    pub fn corrected(&self, k: usize, eps: f64) -> Vector {
        self.corrected_raw(k, eps).normalize()
    }

    pub fn skew_defect(&self) -> f64 {
        (&self.c + self.c.transpose()).amax()
    }
}

/// Correction matrix for the first `k_max` directions.
pub fn expansion(ds: &TangentDataset, k_max: usize, provider: &dyn AlphaProvider, tol: &Tolerances) -> Result<ExpansionResult> {
    let cov = covariance(ds)?;
    expansion_with(ds, &cov, k_max, provider, tol)
}

pub fn expansion_with(
    ds: &TangentDataset,
    cov: &CovarianceOperator,
    k_max: usize,
    provider: &dyn AlphaProvider,
    tol: &Tolerances,
) -> Result<ExpansionResult> {
    let d = cov.dim();
    if k_max == 0 || k_max > d {
        return Err(PgaError::InvalidInput(format!("k_max must be in 1..={d}")));
    }
    cov.require_gaps(k_max, tol.spectral_gap)?;
    let mut alpha = Mat::zeros(k_max, d);
    let mut c = Mat::zeros(d, d);
    for k in 0..k_max {
        let row = provider.alpha_row(ds, cov, k)?;
        for j in (k + 1)..d {
            alpha[(k, j)] = row[j];
            let v = row[j] / (cov.beta[j] - cov.beta[k]);
            c[(k, j)] = v;
            c[(j, k)] = -v;
        }
    }
    Ok(ExpansionResult { u: cov.u.clone(), beta: cov.beta.clone(), alpha, c, k_max })
}
