use super::{PgaObjective, TangentDataset};
use crate::error::{PgaError, Result};
use crate::linalg::Vector;
use crate::manifold::Manifold;

/// Geometric ladder `start * ratio^i`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Ladder {
    /// `2^-4, ..., 2^-9`.
    pub const PRIMARY: Ladder = Ladder { start: 0.0625, ratio: 0.5, count: 6 };
    /// `0.75 * 2^-4, ..., 0.75 * 2^-9`, for self-consistency checks.
    pub const SECONDARY: Ladder = Ladder { start: 0.046875, ratio: 0.5, count: 6 };

    pub fn eps(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.start * self.ratio.powi(i as i32)).collect()
    }
}

/// Extrapolates `Y(eps) = a_0 + a_1 eps^2 + a_2 eps^4 + ...` to `eps = 0`,
/// eliminating `order` even powers with polynomial (Neville) extrapolation in
/// `eps^2`. Returns the estimate from the finest window of `order + 1`
/// points and the one from the window before it.
pub fn richardson(eps: &[f64], values: &[Vector], order: usize) -> Result<(Vector, Vector)> {
    if eps.len() != values.len() {
        return Err(PgaError::DimensionMismatch("ladder and values differ in length".into()));
    }
    if eps.len() < order + 2 {
        return Err(PgaError::InsufficientGrid(eps.len()));
    }
    let window = |start: usize| -> Vector {
        let h: Vec<f64> = eps[start..=start + order].iter().map(|e| e * e).collect();
        let mut p: Vec<Vector> = values[start..=start + order].to_vec();
        // Neville's scheme evaluated at h = 0
        for level in 1..=order {
            for i in 0..=(order - level) {
                let (hi, hj) = (h[i], h[i + level]);
                p[i] = (&p[i + 1] * hi - &p[i] * hj) / (hi - hj);
            }
        }
        p[0].clone()
    };
    let last = eps.len() - order - 1;
    Ok((window(last), window(last - 1)))
}

/// Runs `f` on a ladder, extrapolates, and fails when the two finest
/// estimates disagree by more than `agreement` relative.
pub fn extract<F>(mut f: F, ladder: &Ladder, order: usize, agreement: f64) -> Result<Vector>
where
    F: FnMut(f64) -> Result<Vector>,
{
    let eps = ladder.eps();
    let mut values = Vec::with_capacity(eps.len());
    for &e in &eps {
        values.push(f(e)?);
    }
    let (a, b) = richardson(&eps, &values, order)?;
    let scale = a.norm().max(b.norm());
    let diff = (&a - &b).norm();
    if diff > agreement * scale && diff > 1e-300 {
        return Err(PgaError::SeriesExtractionUnstable { first: a.norm(), second: b.norm() });
    }
    Ok(a)
}

/// `(f_{k,2}(v), f_{k,4}(v))` for unit `v` orthogonal to the orthonormal `prior`.
///
/// The quartic term is the closed form on the sphere and for `k = 1` on the
/// matrix spaces; for `k = 2` there it is extracted numerically from the
/// exact objective. Larger `k` on the matrix spaces is unsupported.
pub fn objective_series(ds: &TangentDataset, v: &Vector, prior: &[Vector]) -> Result<(f64, f64)> {
    let n = ds.len() as f64;
    let f2 = ds
        .tangents()
        .iter()
        .map(|q| q.norm_squared() - prior.iter().map(|u| q.dot(u).powi(2)).sum::<f64>() - q.dot(v).powi(2))
        .sum::<f64>()
        / n;
    let f4 = match ds.manifold() {
        Manifold::Sphere { r, .. } => crate::sphere::f4_sphere(ds.tangents(), prior, v, r),
        m => match prior.len() {
            0 => {
                let sign = if matches!(m, Manifold::Spd { .. }) { 1.0 } else { -1.0 };
                let qs = ds.lifted_tangents();
                crate::spd::f14_signed(sign, &qs, &ds.frame().tangent(v))
            }
            1 => numeric_f4(ds, v, prior, f2, &Ladder::PRIMARY, 1e-4)?,
            k => return Err(PgaError::UnsupportedOrder(format!("quartic objective term for k = {}", k + 1))),
        },
    };
    Ok((f2, f4))
}

/// Quartic coefficient of the exact objective by series extraction.
pub fn numeric_f4(ds: &TangentDataset, v: &Vector, prior: &[Vector], f2: f64, ladder: &Ladder, agreement: f64) -> Result<f64> {
    let est = extract(
        |e| {
            let pts = ds.scaled(e).samples();
            let obj = PgaObjective::new(ds.frame(), &pts, prior);
            let f = obj.value(v)?;
            Ok(Vector::from_element(1, (f - f2 * e * e) / e.powi(4)))
        },
        ladder,
        2,
        agreement,
    )?;
    Ok(est[0])
}
