use super::{Manifold, Point};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanResult {
    pub mean: Point,
    pub iterations: usize,
    /// Norm of `(1/N) sum Log_mu(p_i)` at the returned point.
    pub stationarity: f64,
}

fn mean_log(m: &Manifold, mu: &Point, points: &[Point]) -> Result<(Mat, f64)> {
    let mut g = Mat::zeros(mu.nrows(), mu.ncols());
    let mut f = 0.0;
    for p in points {
        let l = m.log(mu, p)?;
        f += m.metric(mu, &l, &l)?;
        g += l;
    }
    let n = points.len() as f64;
    Ok((g / n, f / n))
}

/// Karcher mean with the default tolerances, started at the first point.
pub fn intrinsic_mean(m: &Manifold, points: &[Point]) -> Result<MeanResult> {
    let start = points.first().ok_or_else(|| PgaError::InvalidInput("empty data set".into()))?;
    intrinsic_mean_with(m, points, start, &Tolerances::default())
}

/// Karcher mean by fixed-point steps `mu <- Exp_mu((1/N) sum Log_mu p_i)`,
/// halving the step whenever the mean squared distance would increase.
pub fn intrinsic_mean_with(m: &Manifold, points: &[Point], start: &Point, tol: &Tolerances) -> Result<MeanResult> {
    if points.is_empty() {
        return Err(PgaError::InvalidInput("empty data set".into()));
    }
    for p in points {
        m.check_point(p)?;
    }
    m.check_point(start)?;
    let mut mu = start.clone();
    let (mut g, mut f) = mean_log(m, &mu, points)?;
    let mut gn = m.norm(&mu, &g)?;
    for it in 0..tol.mean_max_iter {
        if gn <= tol.mean_stationarity {
            return Ok(MeanResult { mean: mu, iterations: it, stationarity: gn });
        }
        let mut step = 1.0;
        let mut next = None;
        for _ in 0..=tol.mean_max_halvings {
            if let Ok(cand) = m.exp(&mu, &(&g * step)) {
                if let Ok((g2, f2)) = mean_log(m, &cand, points) {
                    let g2n = m.norm(&cand, &g2)?;
                    if f2 < f || (f2 <= f * (1.0 + 1e-14) && g2n < gn) {
                        next = Some((cand, g2, f2, g2n));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        match next {
            Some((cand, g2, f2, g2n)) => {
                mu = cand;
                g = g2;
                f = f2;
                gn = g2n;
            }
            None => {
                return Err(PgaError::NonConvergence(format!(
                    "intrinsic mean: no decrease after {} halvings (stationarity {gn:e})",
                    tol.mean_max_halvings
                )))
            }
        }
    }
    if gn <= tol.mean_stationarity {
        return Ok(MeanResult { mean: mu, iterations: tol.mean_max_iter, stationarity: gn });
    }
    Err(PgaError::NonConvergence(format!(
        "intrinsic mean: {} iterations, stationarity {gn:e}",
        tol.mean_max_iter
    )))
}

/// `(1/N) sum d(mu, p_i)^2`.
pub fn intrinsic_variance(m: &Manifold, mu: &Point, points: &[Point]) -> Result<f64> {
    if points.is_empty() {
        return Err(PgaError::InvalidInput("empty data set".into()));
    }
    let mut s = 0.0;
    for p in points {
        s += m.distance(mu, p)?.powi(2);
    }
    Ok(s / points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use crate::manifold::Frame;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_mean_of_symmetric_pair() {
        let m = Manifold::sphere(2, 1.0).unwrap();
        let a = Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = Mat::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
        let r = intrinsic_mean(&m, &[a, b]).unwrap();
        let h = 0.5f64.sqrt();
        assert!((r.mean - Mat::from_column_slice(3, 1, &[h, h, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn spd_mean_of_commuting_pair_is_geometric() {
        let m = Manifold::spd(2).unwrap();
        let d = |a: f64, b: f64| Mat::from_diagonal(&Vector::from_vec(vec![a, b]));
        let r = intrinsic_mean(&m, &[d(1.0, 4.0), d(4.0, 1.0)]).unwrap();
        assert!((&r.mean - d(2.0, 2.0)).norm() < 1e-12);
        let v = intrinsic_variance(&m, &r.mean, &[d(1.0, 4.0), d(4.0, 1.0)]).unwrap();
        assert!((v - 2f64.ln().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn centred_tangent_samples_have_that_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for m in [Manifold::sphere(3, 2.0).unwrap(), Manifold::spd(3).unwrap(), Manifold::so(3).unwrap()] {
            let f0 = Frame::new(m, m.base_point()).unwrap();
            let mu = f0.lower(&f0.exp_coords(&Vector::from_fn(m.dim(), |_, _| rng.random_range(-0.5..0.5))));
            let f = Frame::new(m, mu.clone()).unwrap();
            let mut cs: Vec<Vector> = (0..12)
                .map(|_| Vector::from_fn(m.dim(), |_, _| rng.random_range(-0.4..0.4)))
                .collect();
            let c: Vector = cs.iter().fold(Vector::zeros(m.dim()), |a, b| a + b) / cs.len() as f64;
            for x in cs.iter_mut() {
                *x -= &c;
            }
            let pts: Vec<Mat> = cs.iter().map(|c| f.lower(&f.exp_coords(c))).collect();
            let r = intrinsic_mean(&m, &pts).unwrap();
            assert!(m.distance(&r.mean, &mu).unwrap() < 1e-9, "{}", m.name());
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        let m = Manifold::so(3).unwrap();
        assert!(matches!(intrinsic_mean(&m, &[]), Err(PgaError::InvalidInput(_))));
    }
}
