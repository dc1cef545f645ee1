use super::{complement_basis, orthogonalize, sym_eig, Mat, Vector};
use crate::error::{PgaError, Result};

/// Step rule for [`minimize_on_sphere`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereMinimizer {
    /// Newton steps on the feasible great sphere with a finite-difference
    /// Hessian of the Riemannian gradient; falls back to gradient steps.
    #[default]
    Newton,
    /// Projected gradient with backtracking and renormalization.
    ProjectedGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Gradient norm below which a stalled run still counts as converged.
    pub gtol: f64,
    /// Relative step size at which iteration stops.
    pub xtol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step for Hessian columns.
    pub fd_step: f64,
    /// Absolute floor for the finite-difference step (unconstrained solver).
    pub fd_floor: f64,
    pub method: SphereMinimizer,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-8,
            xtol: 1e-14,
            max_iter: 10_000,
            fd_step: 1e-6,
            fd_floor: 1e-10,
            method: SphereMinimizer::Newton,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeReport {
    pub x: Vector,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// False when the iteration cap was hit or the run stalled with a large gradient.
    pub converged: bool,
}

fn matrix_from_columns(cols: &[Vector], rows: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Solve `H d = -g` with eigenvalues replaced by their magnitudes
/// (floored), so saddle directions still give descent.
fn modified_newton_direction(h: &Mat, g: &Vector) -> Result<Vector> {
    let hs = (h + h.transpose()) * 0.5;
    let e = sym_eig(&hs)?;
    let lmax = e.values.amax();
    let floor = (lmax * 1e-10).max(1e-300);
    let mut d = Vector::zeros(g.len());
    for k in 0..g.len() {
        let v = e.vector(k);
        let lam = e.values[k].abs().max(floor);
        d -= &v * (v.dot(g) / lam);
    }
    Ok(d)
}

fn retract(x: &Vector, constraints: &[Vector]) -> Vector {
    orthogonalize(x, constraints).normalize()
}

/// Minimize `f` over unit vectors orthogonal to `constraints`.
///
/// `f` returns the value and the Euclidean gradient. The result is unit
/// length and orthogonal to every constraint vector; hitting the iteration
/// cap is reported through `converged` rather than as an error.
pub fn minimize_on_sphere<F>(
    mut f: F,
    constraints: &[Vector],
    x0: &Vector,
    opts: &MinimizeOptions,
) -> Result<MinimizeReport>
where
    F: FnMut(&Vector) -> Result<(f64, Vector)>,
{
    let dim = x0.len();
    if constraints.iter().any(|c| c.len() != dim) {
        return Err(PgaError::DimensionMismatch("constraint vector length".into()));
    }
    if constraints.len() >= dim {
        return Err(PgaError::InvalidInput("no feasible unit vector: constraints span the space".into()));
    }
    let start = orthogonalize(x0, constraints);
    if start.norm() < 1e-12 {
        return Err(PgaError::InvalidInput("starting point lies in the constraint span".into()));
    }
    let mut x = start.normalize();
    let mut evals = 1;
    let (mut fx, mut gx) = f(&x)?;

    let riemannian = |x: &Vector, ge: &Vector| -> Vector {
        let mut all = constraints.to_vec();
        all.push(x.clone());
        orthogonalize(ge, &all)
    };

    let mut rg = riemannian(&x, &gx);
    let mut iterations = 0;
    let mut converged = false;
    let mut alpha_pg = 1.0;
    while iterations < opts.max_iter {
        let gn = rg.norm();
        if gn == 0.0 {
            converged = true;
            break;
        }
        iterations += 1;
        let mut all = constraints.to_vec();
        all.push(x.clone());
        let basis = complement_basis(dim, &all);
        if basis.is_empty() {
            converged = true;
            break;
        }
        let bmat = matrix_from_columns(&basis, dim);
        let g = bmat.transpose() * &gx;

        let direction = match opts.method {
            SphereMinimizer::Newton => {
                let m = basis.len();
                let h = opts.fd_step;
                let mut hess = Mat::zeros(m, m);
                for (b, dir) in basis.iter().enumerate() {
                    let xb = retract(&(&x + dir * h), constraints);
                    let (_, geb) = f(&xb)?;
                    evals += 1;
                    let rgb = riemannian(&xb, &geb);
                    let col = (bmat.transpose() * rgb - &g) / h;
                    hess.set_column(b, &col);
                }
                let d = modified_newton_direction(&hess, &g)?;
                // never step further than a quarter turn
                let dn = d.norm();
                if dn > 0.5 { d * (0.5 / dn) } else { d }
            }
            SphereMinimizer::ProjectedGradient => -&g * alpha_pg,
        };

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = retract(&(&x + &bmat * (&direction * step)), constraints);
            let (ft, gt) = f(&trial)?;
            evals += 1;
            let rgt = riemannian(&trial, &gt);
            let tiny = 1e-11 * fx.abs().max(ft.abs());
            let decrease = ft < fx - 1e-4 * step * (-g.dot(&direction)).max(0.0);
            let flat_but_better = (ft - fx).abs() <= tiny && rgt.norm() < gn;
            if decrease || flat_but_better {
                accepted = Some((trial, ft, gt, rgt));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, ft, gt, rgt)) => {
                let moved = (&trial - &x).norm();
                x = trial;
                fx = ft;
                gx = gt;
                rg = rgt;
                if opts.method == SphereMinimizer::ProjectedGradient {
                    alpha_pg = (alpha_pg * step * 2.0).min(1e6);
                    if rg.norm() < opts.gtol {
                        converged = true;
                        break;
                    }
                }
                if moved <= opts.xtol {
                    converged = rg.norm() < opts.gtol;
                    break;
                }
            }
            None => {
                converged = gn < opts.gtol;
                break;
            }
        }
    }
    Ok(MinimizeReport {
        grad_norm: rg.norm(),
        x,
        value: fx,
        iterations,
        evaluations: evals,
        converged,
    })
}

/// Unconstrained minimization in R^k by modified Newton steps with a
/// forward-difference Hessian of the supplied gradient.
pub fn minimize_newton<F>(mut f: F, x0: &Vector, opts: &MinimizeOptions) -> Result<MinimizeReport>
where
    F: FnMut(&Vector) -> Result<(f64, Vector)>,
{
    let k = x0.len();
    let mut x = x0.clone();
    let (mut fx, mut g) = f(&x)?;
    let mut evals = 1;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let gn = g.norm();
        if gn == 0.0 || k == 0 {
            converged = true;
            break;
        }
        iterations += 1;
        let h = opts.fd_step * x.norm().max(opts.fd_floor);
        let mut hess = Mat::zeros(k, k);
        for j in 0..k {
            let mut xj = x.clone();
            xj[j] += h;
            let (_, gj) = f(&xj)?;
            evals += 1;
            hess.set_column(j, &((gj - &g) / h));
        }
        let d = modified_newton_direction(&hess, &g)?;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + &d * step;
            let (ft, gt) = f(&trial)?;
            evals += 1;
            let tiny = 1e-11 * fx.abs().max(ft.abs());
            if ft < fx - 1e-4 * step * (-g.dot(&d)).max(0.0)
                || ((ft - fx).abs() <= tiny && gt.norm() < gn)
            {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, ft, gt)) => {
                let moved = (&trial - &x).norm();
                x = trial;
                fx = ft;
                g = gt;
                if moved <= opts.xtol * x.norm().max(opts.fd_floor) {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = gn < opts.gtol;
                break;
            }
        }
    }
    Ok(MinimizeReport {
        grad_norm: g.norm(),
        x,
        value: fx,
        iterations,
        evaluations: evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig;

    fn rayleigh(a: Vector) -> impl FnMut(&Vector) -> Result<(f64, Vector)> {
        move |v: &Vector| {
            let c = a.dot(v);
            Ok((-c * c, &a * (-2.0 * c)))
        }
    }

    #[test]
    fn rayleigh_quotient_without_constraints() {
        let a = Vector::from_vec(vec![1.0, 2.0, -2.0]);
        let x0 = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        for method in [SphereMinimizer::Newton, SphereMinimizer::ProjectedGradient] {
            let opts = MinimizeOptions { method, ..Default::default() };
            let r = minimize_on_sphere(rayleigh(a.clone()), &[], &x0, &opts).unwrap();
            assert!(r.converged, "{method:?}");
            assert!(crate::linalg::line_angle(&r.x, &a) < 1e-7, "{method:?}");
            assert!(r.value <= -0.0);
        }
    }

    #[test]
    fn constraint_is_respected() {
        let u1 = Vector::from_vec(vec![0.0, 0.0, 1.0]);
        let a = Vector::from_vec(vec![3.0, -1.0, 0.0]);
        let x0 = Vector::from_vec(vec![0.3, 0.3, 0.9]);
        let r = minimize_on_sphere(rayleigh(a.clone()), &[u1.clone()], &x0, &Default::default()).unwrap();
        assert!(r.x.dot(&u1).abs() < 1e-10);
        assert!((r.x.norm() - 1.0).abs() < 1e-12);
        assert!(crate::linalg::line_angle(&r.x, &a) < 1e-9);
    }

    #[test]
    fn quadratic_form_matches_eigenvector_on_complement() {
        let b = Mat::from_fn(5, 5, |i, j| ((i * 3 + j * 7) as f64).sin());
        let a = &b + b.transpose();
        let e = sym_eig(&a).unwrap();
        // f(v) = v^T A v: minimized by the most negative eigenvector
        let imin = (0..5).min_by(|&i, &j| e.values[i].partial_cmp(&e.values[j]).unwrap()).unwrap();
        let a2 = a.clone();
        let f = move |v: &Vector| Ok((v.dot(&(&a2 * v)), &a2 * v * 2.0));
        let x0 = Vector::from_element(5, 1.0);
        let r = minimize_on_sphere(f, &[], &x0, &Default::default()).unwrap();
        assert!(crate::linalg::line_angle(&r.x, &e.vector(imin)) < 1e-8);
        assert!((r.value - e.values[imin]).abs() < 1e-12);
        assert!(r.value <= x0.dot(&(&a * &x0)) / 5.0);

        // restricted to the complement of that eigenvector: next smallest
        let u = e.vector(imin);
        let a3 = a.clone();
        let f = move |v: &Vector| Ok((v.dot(&(&a3 * v)), &a3 * v * 2.0));
        let r = minimize_on_sphere(f, &[u.clone()], &x0, &Default::default()).unwrap();
        let mut rest: Vec<usize> = (0..5).filter(|&i| i != imin).collect();
        rest.sort_by(|&i, &j| e.values[i].partial_cmp(&e.values[j]).unwrap());
        assert!(crate::linalg::line_angle(&r.x, &e.vector(rest[0])) < 1e-8);
        assert!(r.x.dot(&u).abs() < 1e-10);
    }

    #[test]
    fn newton_unconstrained_quadratic() {
        let c = Vector::from_vec(vec![1e-3, -2e-3]);
        let f = |x: &Vector| {
            let d = x - &c;
            Ok((d.dot(&d) + 0.1 * d[0] * d[1], Vector::from_vec(vec![2.0 * d[0] + 0.1 * d[1], 2.0 * d[1] + 0.1 * d[0]])))
        };
        let r = minimize_newton(f, &Vector::zeros(2), &Default::default()).unwrap();
        assert!((r.x - c).norm() < 1e-16);
    }
}
