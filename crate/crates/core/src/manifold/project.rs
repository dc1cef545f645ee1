use super::{sphere_angle, Frame, Manifold, Point, Sample, Tangent};
use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::{minimize_newton, Mat, MinimizeOptions, Vector};

/// `H = Exp_mu(span{directions})` with orthonormal directions at `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSubspace {
    pub mu: Point,
    pub directions: Vec<Tangent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Point,
    /// Coordinates of `Log_mu(point)` along the directions.
    pub coeffs: Vector,
    pub sqdist: f64,
    /// Set when another local minimum ties the best squared distance.
    pub non_unique: bool,
}

/// Minimizer of `s -> d(Exp_mu(sum s_j v_j), p)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSolve {
    pub coeffs: Vector,
    pub sqdist: f64,
    /// Gradient of `d(Exp_mu(S), p)^2` in all frame coordinates at the optimum.
    pub grad: Vector,
    pub converged: bool,
}

fn combine(dirs: &[Vector], s: &Vector, dim: usize) -> Vector {
    let mut out = Vector::zeros(dim);
    for (d, &c) in dirs.iter().zip(s.iter()) {
        out += d * c;
    }
    out
}

/// Projection coefficients of a lifted point `p` onto the geodesic subspace
/// spanned by orthonormal coordinate directions `dirs`.
///
/// The sphere uses the closed form (normalized projection onto
/// `span{mu, v_j}`); the matrix spaces run Newton from `seed`, or from the
/// components of `Log(p)` when no seed is given.
pub fn solve_coefficients(frame: &Frame, dirs: &[Vector], sample: &Sample, seed: Option<&Vector>) -> Result<CoeffSolve> {
    let dim = frame.dim();
    let k = dirs.len();
    if let Manifold::Sphere { r, .. } = frame.manifold() {
        let p = &sample.point;
        let mu = frame.mu();
        let amb: Vec<Mat> = dirs.iter().map(|d| frame.tangent(d)).collect();
        let mut w_tan = Mat::zeros(mu.nrows(), 1);
        for a in &amb {
            w_tan += a * a.dot(p);
        }
        let w = mu * (mu.dot(p) / (r * r)) + &w_tan;
        if w.norm() <= 1e-12 * r {
            return Err(PgaError::CutLocus("point is orthogonal to the subspace".into()));
        }
        let proj = &w * (r / w.norm());
        let (theta, _) = sphere_angle(mu, &proj, r);
        let tn = w_tan.norm();
        let coeffs = if tn == 0.0 {
            Vector::zeros(k)
        } else {
            Vector::from_iterator(k, amb.iter().map(|a| r * theta * a.dot(&w_tan) / tn))
        };
        let (sqdist, grad) = frame.sqdist_grad_sample(&combine(dirs, &coeffs, dim), sample)?;
        return Ok(CoeffSolve { coeffs, sqdist, grad, converged: true });
    }
    newton_coefficients(frame, dirs, sample, seed)
}

/// Newton iteration for the projection coefficients on any of the spaces
/// (the sphere included, where it serves as a check of the closed form).
pub fn newton_coefficients(frame: &Frame, dirs: &[Vector], sample: &Sample, seed: Option<&Vector>) -> Result<CoeffSolve> {
    let dim = frame.dim();
    let k = dirs.len();
    let log = match &sample.log {
        Some(l) => Ok(l.clone()),
        None => frame.log_coords(&sample.point),
    };
    let start = match (seed, &log) {
        (Some(s), _) => s.clone(),
        (None, Ok(l)) => Vector::from_iterator(k, dirs.iter().map(|d| d.dot(l))),
        (None, Err(e)) => return Err(e.clone()),
    };
    let scale = log.map(|l| l.norm()).unwrap_or(1.0).max(1e-8);
    let opts = MinimizeOptions { gtol: 1e-8 * scale, fd_floor: scale, ..Default::default() };
    let report = minimize_newton(
        |s: &Vector| {
            let (d2, g) = frame.sqdist_grad_sample(&combine(dirs, s, dim), sample)?;
            let gs = Vector::from_iterator(k, dirs.iter().map(|d| d.dot(&g)));
            Ok((d2, gs))
        },
        &start,
        &opts,
    )?;
    let (sqdist, grad) = frame.sqdist_grad_sample(&combine(dirs, &report.x, dim), sample)?;
    Ok(CoeffSolve { coeffs: report.x, sqdist, grad, converged: report.converged })
}

/// Closest point of `h` found by Newton iteration from the components of
/// `Log_mu(p)`, without closed forms or multiple starts.
pub fn project_numeric(m: &Manifold, p: &Point, h: &GeodesicSubspace) -> Result<Projection> {
    m.check_point(p)?;
    let frame = Frame::new(*m, h.mu.clone())?;
    let dirs: Vec<Vector> = h.directions.iter().map(|d| frame.coords_at_mu(d)).collect();
    let s = newton_coefficients(&frame, &dirs, &Sample::from_point(frame.lift(p)), None)?;
    if !s.converged {
        return Err(PgaError::NonConvergence("projection did not converge".into()));
    }
    let c = combine(&dirs, &s.coeffs, frame.dim());
    Ok(Projection {
        point: frame.lower(&frame.exp_coords(&c)),
        coeffs: s.coeffs,
        sqdist: s.sqdist,
        non_unique: false,
    })
}

/// Projection with the default tolerances.
pub fn project(m: &Manifold, p: &Point, h: &GeodesicSubspace) -> Result<Projection> {
    project_with(m, p, h, &Tolerances::default())
}

/// Closest point of `h` to `p`, searched from several starts on the matrix
/// spaces so ties between local minima can be reported.
pub fn project_with(m: &Manifold, p: &Point, h: &GeodesicSubspace, tol: &Tolerances) -> Result<Projection> {
    m.check_point(p)?;
    let frame = Frame::new(*m, h.mu.clone())?;
    let k = h.directions.len();
    if k == 0 || k > m.dim() {
        return Err(PgaError::InvalidInput(format!("subspace needs 1..={} directions, got {k}", m.dim())));
    }
    let mut dirs = Vec::with_capacity(k);
    for d in &h.directions {
        m.check_tangent(&h.mu, d)?;
        dirs.push(frame.coords_at_mu(d));
    }
    for i in 0..k {
        for j in 0..k {
            let want = if i == j { 1.0 } else { 0.0 };
            if (dirs[i].dot(&dirs[j]) - want).abs() > 1e-8 {
                return Err(PgaError::InvalidInput("directions are not orthonormal".into()));
            }
        }
    }
    let pl = Sample::from_point(frame.lift(p));
    let finish = |s: &CoeffSolve, non_unique: bool| -> Projection {
        let c = combine(&dirs, &s.coeffs, frame.dim());
        Projection {
            point: frame.lower(&frame.exp_coords(&c)),
            coeffs: s.coeffs.clone(),
            sqdist: s.sqdist,
            non_unique,
        }
    };
    if m.is_sphere() {
        return match solve_coefficients(&frame, &dirs, &pl, None) {
            Ok(s) => Ok(finish(&s, false)),
            Err(PgaError::CutLocus(_)) => {
                // every point of H is equidistant
                let s = CoeffSolve {
                    coeffs: Vector::zeros(k),
                    sqdist: m.distance(&h.mu, p)?.powi(2),
                    grad: Vector::zeros(frame.dim()),
                    converged: true,
                };
                Ok(finish(&s, true))
            }
            Err(e) => Err(e),
        };
    }
    let l = frame.log_coords(&pl.point)?;
    let s0 = Vector::from_iterator(k, dirs.iter().map(|d| d.dot(&l)));
    let delta = 0.5 * s0.norm().max(0.1);
    let mut seeds = vec![s0.clone()];
    for m in 0..tol.projection_starts.saturating_sub(1) {
        let mut s = s0.clone();
        let axis = (m / 2) % k;
        s[axis] += if m % 2 == 0 { delta } else { -delta };
        seeds.push(s);
    }
    let mut found: Vec<CoeffSolve> = Vec::new();
    for s in &seeds {
        if let Ok(sol) = solve_coefficients(&frame, &dirs, &pl, Some(s)) {
            found.push(sol);
        }
    }
    let best = found
        .iter()
        .min_by(|a, b| a.sqdist.total_cmp(&b.sqdist))
        .ok_or_else(|| PgaError::NonConvergence("projection failed from every start".into()))?;
    if !best.converged {
        return Err(PgaError::NonConvergence("projection did not converge".into()));
    }
    let non_unique = found.iter().any(|o| {
        o.converged
            && (o.sqdist - best.sqdist).abs() <= tol.projection_tie
            && (&o.coeffs - &best.coeffs).norm() > 1e-3 * best.coeffs.norm().max(1e-3)
    });
    Ok(finish(best, non_unique))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hat3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_closed_form_example() {
        let m = Manifold::sphere(2, 1.0).unwrap();
        let mu = Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let v = Mat::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
        let p = Mat::from_column_slice(3, 1, &[0.0, 0.6, 0.8]);
        let h = GeodesicSubspace { mu, directions: vec![v] };
        let pr = project(&m, &p, &h).unwrap();
        assert!((pr.point - Mat::from_column_slice(3, 1, &[0.0, 1.0, 0.0])).norm() < 1e-14);
        assert!((pr.coeffs[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(!pr.non_unique);
    }

    #[test]
    fn so3_projection_onto_axis() {
        let m = Manifold::so(3).unwrap();
        let p = m.exp(&m.base_point(), &hat3([0.3, 0.0, 0.0])).unwrap();
        let h = GeodesicSubspace { mu: m.base_point(), directions: vec![hat3([1.0, 0.0, 0.0])] };
        let pr = project(&m, &p, &h).unwrap();
        assert!((pr.coeffs[0] - 0.3).abs() < 1e-12);
        assert!(pr.sqdist < 1e-20);
    }

    #[test]
    fn projections_minimize_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for m in [Manifold::sphere(4, 1.5).unwrap(), Manifold::spd(3).unwrap(), Manifold::so(3).unwrap()] {
            let f = Frame::new(m, m.base_point()).unwrap();
            let dirs: Vec<Vector> = crate::linalg::complement_basis(m.dim(), &[])
                .into_iter()
                .take(2)
                .collect();
            let h = GeodesicSubspace {
                mu: m.base_point(),
                directions: dirs.iter().map(|d| f.tangent_at_mu(d)).collect(),
            };
            for _ in 0..5 {
                let c = Vector::from_fn(m.dim(), |_, _| rng.random_range(-0.5..0.5));
                let p = f.lower(&f.exp_coords(&c));
                let pr = project(&m, &p, &h).unwrap();
                assert!((m.distance(&pr.point, &p).unwrap().powi(2) - pr.sqdist).abs() < 1e-12);
                for _ in 0..20 {
                    let s = &pr.coeffs + Vector::from_fn(2, |_, _| rng.random_range(-0.05..0.05));
                    let q = f.lower(&f.exp_coords(&combine(&dirs, &s, m.dim())));
                    assert!(m.distance(&q, &p).unwrap().powi(2) >= pr.sqdist - 1e-13, "{}", m.name());
                }
            }
        }
    }

    #[test]
    fn rejects_non_orthonormal_directions() {
        let m = Manifold::so(3).unwrap();
        let h = GeodesicSubspace {
            mu: m.base_point(),
            directions: vec![hat3([1.0, 0.0, 0.0]), hat3([1.0, 1.0, 0.0])],
        };
        assert!(matches!(project(&m, &m.base_point(), &h), Err(PgaError::InvalidInput(_))));
    }
}
