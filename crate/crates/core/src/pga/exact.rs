use super::{covariance, TangentDataset};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::{minimize_on_sphere, orthogonalize, MinimizeOptions, Vector};
use crate::manifold::{project_with, solve_coefficients, CoeffSolve, Frame, GeodesicSubspace, Sample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;

/// `f_k(v) = (1/N) sum d(p_i, pi_{H}(p_i))^2` with `H` spanned by the prior
/// directions and `v`, together with its Euclidean gradient in `v`.
///
/// Projection coefficients are warm-started from the previous call.
pub struct PgaObjective<'a> {
    frame: &'a Frame,
    points: &'a [Sample],
    prior: Vec<Vector>,
    warm: RefCell<Vec<Option<Vector>>>,
}

impl<'a> PgaObjective<'a> {
    /// `points` are in the frame's lifted picture; `prior` must be orthonormal.
    pub fn new(frame: &'a Frame, points: &'a [Sample], prior: &[Vector]) -> Self {
        Self {
            frame,
            points,
            prior: prior.to_vec(),
            warm: RefCell::new(vec![None; points.len()]),
        }
    }

    /// Per-point projection solutions for the subspace `prior + v`.
    pub fn solve(&self, v: &Vector) -> Result<Vec<CoeffSolve>> {
        let mut dirs = self.prior.clone();
        dirs.push(v.clone());
        let mut warm = self.warm.borrow_mut();
        let mut out = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            let seed = warm[i].as_ref().filter(|s| s.len() == dirs.len());
            let mut sol = solve_coefficients(self.frame, &dirs, p, seed)?;
            if !sol.converged && seed.is_some() {
                sol = solve_coefficients(self.frame, &dirs, p, None)?;
            }
            if !sol.converged {
                return Err(PgaError::NonConvergence(format!("projection of point {i} did not converge")));
            }
            warm[i] = Some(sol.coeffs.clone());
            out.push(sol);
        }
        Ok(out)
    }

    pub fn value(&self, v: &Vector) -> Result<f64> {
        Ok(self.value_grad(v)?.0)
    }

    pub fn value_grad(&self, v: &Vector) -> Result<(f64, Vector)> {
        let sols = self.solve(v)?;
        let k = self.prior.len();
        let n = self.points.len() as f64;
        let mut f = 0.0;
        let mut g = Vector::zeros(self.frame.dim());
        for s in &sols {
            f += s.sqdist;
            g += &s.grad * s.coeffs[k];
        }
        Ok((f / n, g / n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedKind {
    Eigenvector,
    Supplied,
    Random,
}

#[derive(Debug, Clone)]
pub struct PgaOptions {
    pub k_max: usize,
    /// Starting directions per k (e.g. corrected expansions); eigenvectors otherwise.
    pub seeds: Option<Vec<Vector>>,
    pub minimize: MinimizeOptions,
    /// Re-project every point from several starts at the end and flag ties.
    pub check_ties: bool,
    pub tol: Tolerances,
}

impl PgaOptions {
    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            seeds: None,
            minimize: MinimizeOptions::default(),
            check_ties: false,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgaResult {
    /// Unit directions in frame coordinates, sign-aligned with the eigenvectors.
    pub directions: Vec<Vector>,
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
    pub grad_norms: Vec<f64>,
    pub converged: Vec<bool>,
    pub ties: Vec<bool>,
    pub seed_kind: Vec<SeedKind>,
}

/// PGA directions by successive minimization of the residual objective over
/// unit vectors orthogonal to the directions already found.
pub fn exact_pga(ds: &TangentDataset, opts: &PgaOptions) -> Result<PgaResult> {
    let dim = ds.dim();
    if opts.k_max == 0 || opts.k_max > dim {
        return Err(PgaError::InvalidInput(format!("k_max must be in 1..={dim}")));
    }
    if let Some(s) = &opts.seeds {
        if s.len() < opts.k_max || s.iter().any(|v| v.len() != dim) {
            return Err(PgaError::DimensionMismatch("seed directions".into()));
        }
    }
    let cov = covariance(ds)?;
    let degenerate = cov.require_gaps(opts.k_max, opts.tol.spectral_gap).is_err();
    let points = ds.samples();
    let scale = ds.tangents().iter().map(|q| q.norm_squared()).sum::<f64>() / ds.len() as f64;
    let mopts = MinimizeOptions { gtol: opts.minimize.gtol * scale.max(f64::MIN_POSITIVE), ..opts.minimize };
    let mut res = PgaResult {
        directions: Vec::new(),
        residuals: Vec::new(),
        iterations: Vec::new(),
        grad_norms: Vec::new(),
        converged: Vec::new(),
        ties: Vec::new(),
        seed_kind: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a);
    for k in 0..opts.k_max {
        let prior = res.directions.clone();
        let obj = PgaObjective::new(ds.frame(), &points, &prior);
        let mut starts: Vec<(Vector, SeedKind)> = Vec::new();
        match &opts.seeds {
            Some(s) => starts.push((s[k].clone(), SeedKind::Supplied)),
            None => starts.push((cov.u[k].clone(), SeedKind::Eigenvector)),
        }
        if degenerate && opts.seeds.is_none() {
            for _ in 0..3 {
                let r = Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
                starts.push((r, SeedKind::Random));
            }
        }
        let mut best: Option<(crate::linalg::MinimizeReport, SeedKind)> = None;
        for (s, kind) in starts {
            if orthogonalize(&s, &prior).norm() < 1e-8 {
                continue;
            }
            let rep = minimize_on_sphere(|v: &Vector| obj.value_grad(v), &prior, &s, &mopts)?;
            if best.as_ref().is_none_or(|(b, _)| rep.value < b.value) {
                best = Some((rep, kind));
            }
        }
        let (rep, kind) = best.ok_or_else(|| PgaError::InvalidInput("no usable starting direction".into()))?;
        let mut v = rep.x;
        if v.dot(&cov.u[k]) < 0.0 {
            v = -v;
        }
        res.directions.push(v);
        res.residuals.push(rep.value);
        res.iterations.push(rep.iterations);
        res.grad_norms.push(rep.grad_norm);
        res.converged.push(rep.converged);
        res.seed_kind.push(kind);
    }
    if opts.check_ties {
        let m = ds.manifold();
        let mu = ds.frame().mu().clone();
        for k in 0..opts.k_max {
            let h = GeodesicSubspace {
                mu: mu.clone(),
                directions: res.directions[..=k].iter().map(|d| ds.frame().tangent_at_mu(d)).collect(),
            };
            let mut tie = false;
            for p in &points {
                tie |= project_with(&m, &ds.frame().lower(&p.point), &h, &opts.tol)?.non_unique;
            }
            res.ties.push(tie);
        }
    } else {
        res.ties = vec![false; opts.k_max];
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::line_angle;
    use crate::manifold::Manifold;
    use rand::Rng;

    fn dataset(m: Manifold, t: Vec<Vector>) -> TangentDataset {
        TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), t).unwrap()
    }

    #[test]
    fn single_geodesic_is_recovered() {
        for m in [Manifold::sphere(3, 1.0).unwrap(), Manifold::spd(2).unwrap(), Manifold::so(3).unwrap()] {
            let dir = Vector::from_fn(m.dim(), |i, _| (i as f64 + 1.0).sqrt()).normalize();
            let t: Vec<Vector> = [-0.4, -0.1, 0.2, 0.3].iter().map(|&s| &dir * s).collect();
            let r = exact_pga(&dataset(m, t), &PgaOptions::new(1)).unwrap();
            assert!(line_angle(&r.directions[0], &dir) < 1e-10, "{}", m.name());
            assert!(r.residuals[0] < 1e-20);
        }
    }

    #[test]
    fn commuting_spd_data_gives_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let m = Manifold::spd(3).unwrap();
        // diagonal coordinates are the first three basis vectors
        let t: Vec<Vector> = (0..15)
            .map(|_| {
                let mut v = Vector::zeros(6);
                v[0] = rng.random_range(-1.0..1.0) * 1.0;
                v[1] = rng.random_range(-1.0..1.0) * 0.6;
                v[2] = rng.random_range(-1.0..1.0) * 0.3;
                v
            })
            .collect();
        let ds = dataset(m, t).centered();
        let cov = covariance(&ds).unwrap();
        let r = exact_pga(&ds, &PgaOptions::new(2)).unwrap();
        for k in 0..2 {
            assert!(line_angle(&r.directions[k], &cov.u[k]) < 1e-9);
        }
        assert!(r.residuals[1] <= r.residuals[0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for m in [Manifold::sphere(4, 1.0).unwrap(), Manifold::spd(3).unwrap(), Manifold::so(3).unwrap()] {
            let d = m.dim();
            let t: Vec<Vector> = (0..8).map(|_| Vector::from_fn(d, |_, _| rng.random_range(-0.5..0.5))).collect();
            let ds = dataset(m, t);
            let pts = ds.samples();
            let prior = vec![Vector::from_fn(d, |i, _| if i == 0 { 1.0 } else { 0.0 })];
            let obj = PgaObjective::new(ds.frame(), &pts, &prior);
            let v = Vector::from_fn(d, |i, _| if i == 0 { 0.0 } else { 1.0 + i as f64 }).normalize();
            let (_, g) = obj.value_grad(&v).unwrap();
            let h = 1e-6;
            for e in 1..d {
                let mut a = v.clone();
                a[e] += h;
                let mut b = v.clone();
                b[e] -= h;
                let fd = (obj.value(&a).unwrap() - obj.value(&b).unwrap()) / (2.0 * h);
                assert!((fd - g[e]).abs() < 1e-7, "{} {e}: {fd} {}", m.name(), g[e]);
            }
        }
    }

    #[test]
    fn directions_are_orthonormal_and_residuals_decrease() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let m = Manifold::sphere(5, 1.0).unwrap();
        let t: Vec<Vector> = (0..30)
            .map(|_| Vector::from_fn(5, |i, _| rng.random_range(-1.0..1.0) * 0.5 / (1.0 + i as f64)))
            .collect();
        let ds = dataset(m, t).centered();
        let mut opts = PgaOptions::new(4);
        opts.check_ties = true;
        let r = exact_pga(&ds, &opts).unwrap();
        for i in 0..4 {
            assert!(r.converged[i]);
            assert!(!r.ties[i]);
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((r.directions[i].dot(&r.directions[j]) - want).abs() < 1e-9);
            }
            if i > 0 {
                assert!(r.residuals[i] <= r.residuals[i - 1]);
            }
        }
    }
}
