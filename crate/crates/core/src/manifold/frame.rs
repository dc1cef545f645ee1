use super::{sphere_angle, sphere_exp, sphere_log, Manifold, Point, Tangent};
use crate::error::Result;
use crate::linalg::{
    complement_basis, dexp, dexp_symmetric, mat_exp, mat_log_rot, mat_log_spd, skew_part, spd_sqrt,
    sym_eig, sym_part, trace_prod, vee3, Mat, Vector,
};

/// Orthonormal coordinates on `T_mu M`.
///
/// On `P(n)` and `SO(n)` every computation is moved to the identity by the
/// isometry `p -> g^-1 p g^-1` (`g = mu^(1/2)`) or `p -> mu^T p`; the
/// "lifted" points and tangents below live at the identity. On the sphere
/// lifting is the identity map and the frame sits at `mu` itself.
#[derive(Debug, Clone)]
pub struct Frame {
    manifold: Manifold,
    mu: Point,
    root: Option<(Mat, Mat)>,
    basis: Vec<Mat>,
}

fn spd_unit(n: usize, e: usize) -> Mat {
    // diagonal entries first, then (i, j) with i < j in row order
    let mut m = Mat::zeros(n, n);
    if e < n {
        m[(e, e)] = 2f64.sqrt();
        return m;
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            if k == e {
                m[(i, j)] = 1.0;
                m[(j, i)] = 1.0;
                return m;
            }
            k += 1;
        }
    }
    unreachable!("basis index out of range")
}

fn so_unit(n: usize, e: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if k == e {
                m[(i, j)] = 1.0;
                m[(j, i)] = -1.0;
                return m;
            }
            k += 1;
        }
    }
    unreachable!("basis index out of range")
}

impl Frame {
    pub fn new(manifold: Manifold, mu: Point) -> Result<Self> {
        manifold.check_point(&mu)?;
        let (root, basis) = match manifold {
            Manifold::Sphere { n, r } => {
                let m = Vector::from_column_slice(mu.as_slice()) / r;
                let b = complement_basis(n + 1, &[m]);
                (None, b.into_iter().map(|v| Mat::from_column_slice(n + 1, 1, v.as_slice())).collect())
            }
            Manifold::Spd { n } => (
                Some(spd_sqrt(&mu)?),
                (0..manifold.dim()).map(|e| spd_unit(n, e)).collect(),
            ),
            Manifold::So { n } => (None, (0..manifold.dim()).map(|e| so_unit(n, e)).collect()),
        };
        Ok(Self { manifold, mu, root, basis })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn mu(&self) -> &Point {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Base point of the lifted picture: `mu` on the sphere, `I` otherwise.
    pub fn base(&self) -> Point {
        match self.manifold {
            Manifold::Sphere { .. } => self.mu.clone(),
            _ => self.manifold.base_point(),
        }
    }

    /// Basis vector `e` at the lifted base point.
    pub fn unit(&self, e: usize) -> &Mat {
        &self.basis[e]
    }

    /// Basis vector `e` transported to `mu`.
    pub fn tangent_at_mu_unit(&self, e: usize) -> Tangent {
        self.lower_tangent(&self.basis[e])
    }

    pub fn lift(&self, p: &Point) -> Point {
        match self.manifold {
            Manifold::Sphere { .. } => p.clone(),
            Manifold::Spd { .. } => {
                let gi = &self.root.as_ref().unwrap().1;
                sym_part(&(gi * p * gi))
            }
            Manifold::So { .. } => self.mu.transpose() * p,
        }
    }

    pub fn lower(&self, p: &Point) -> Point {
        match self.manifold {
            Manifold::Sphere { .. } => p.clone(),
            Manifold::Spd { .. } => {
                let g = &self.root.as_ref().unwrap().0;
                sym_part(&(g * p * g))
            }
            Manifold::So { .. } => &self.mu * p,
        }
    }

    /// Tangent at `mu` to tangent at the lifted base.
    pub fn lift_tangent(&self, x: &Tangent) -> Tangent {
        self.lift(x)
    }

    pub fn lower_tangent(&self, x: &Tangent) -> Tangent {
        self.lower(x)
    }

    /// Inner product of two lifted tangents.
    pub fn inner(&self, x: &Mat, y: &Mat) -> f64 {
        match self.manifold {
            Manifold::Sphere { .. } => x.dot(y),
            Manifold::Spd { .. } => 0.5 * trace_prod(x, y),
            Manifold::So { .. } => -0.5 * trace_prod(x, y),
        }
    }

    /// Coordinates of a lifted tangent.
    pub fn coords(&self, x: &Mat) -> Vector {
        Vector::from_iterator(self.dim(), self.basis.iter().map(|b| self.inner(b, x)))
    }

    /// Lifted tangent with the given coordinates.
    pub fn tangent(&self, c: &Vector) -> Mat {
        let mut out = Mat::zeros(self.basis[0].nrows(), self.basis[0].ncols());
        for (b, &ci) in self.basis.iter().zip(c.iter()) {
            out += b * ci;
        }
        out
    }

    /// Coordinates of a tangent given at `mu`.
    pub fn coords_at_mu(&self, x: &Tangent) -> Vector {
        self.coords(&self.lift_tangent(x))
    }

    pub fn tangent_at_mu(&self, c: &Vector) -> Tangent {
        self.lower_tangent(&self.tangent(c))
    }

    /// `Exp` of a coordinate vector, as a lifted point.
    pub fn exp_coords(&self, c: &Vector) -> Point {
        let x = self.tangent(c);
        match self.manifold {
            Manifold::Sphere { r, .. } => sphere_exp(&self.mu, &x, r),
            Manifold::Spd { .. } => mat_exp(&sym_part(&x)),
            Manifold::So { .. } => mat_exp(&skew_part(&x)),
        }
    }

    /// Coordinates of `Log` of a lifted point.
    pub fn log_coords(&self, p: &Point) -> Result<Vector> {
        let x = match self.manifold {
            Manifold::Sphere { r, .. } => sphere_log(&self.mu, p, r)?,
            Manifold::Spd { .. } => mat_log_spd(p)?,
            Manifold::So { .. } => mat_log_rot(p)?,
        };
        Ok(self.coords(&x))
    }

    /// Squared distance between two lifted points.
    pub fn sqdist(&self, a: &Point, b: &Point) -> Result<f64> {
        match self.manifold {
            Manifold::Sphere { r, .. } => {
                let (t, _) = sphere_angle(a, b, r);
                Ok((r * t).powi(2))
            }
            Manifold::Spd { .. } => {
                let (_, ai) = spd_sqrt(a)?;
                let w = mat_log_spd(&sym_part(&(&ai * b * &ai)))?;
                Ok(0.5 * trace_prod(&w, &w))
            }
            Manifold::So { .. } => {
                let l = mat_log_rot(&(a.transpose() * b))?;
                Ok(0.5 * l.norm_squared())
            }
        }
    }

    /// A lifted point together with its log coordinates.
    pub fn sample(&self, q: &Vector) -> Sample {
        Sample { point: self.exp_coords(q), log: Some(q.clone()) }
    }

    /// `d(Exp(s), p)^2` and its gradient with respect to the coordinates `s`
    /// (`p` lifted).
    pub fn sqdist_grad(&self, s: &Vector, p: &Point) -> Result<(f64, Vector)> {
        self.sqdist_grad_sample(s, &Sample { point: p.clone(), log: None })
    }

    /// As [`Frame::sqdist_grad`]. When the sample carries its log, products
    /// near the identity are formed as `I + X` with `X` accumulated from
    /// `exp(.) - I` terms, which keeps full relative precision for small data.
    pub fn sqdist_grad_sample(&self, s: &Vector, p: &Sample) -> Result<(f64, Vector)> {
        let x = self.tangent(s);
        match self.manifold {
            Manifold::Sphere { r, .. } => {
                let a = x.norm();
                let xp = sphere_exp(&self.mu, &x, r);
                let l = sphere_log(&xp, &p.point, r)?;
                let d2 = l.norm_squared();
                let amb = if a == 0.0 {
                    &l * -2.0
                } else {
                    let u = &x / a;
                    let (sn, cs) = (a / r).sin_cos();
                    let lu = l.dot(&u);
                    let coef = -(sn / r) * l.dot(&self.mu) + cs * lu - (r * sn / a) * lu;
                    (&u * coef + &l * (r * sn / a)) * -2.0
                };
                Ok((d2, self.coords(&amb)))
            }
            Manifold::Spd { n } => {
                let xs = sym_part(&x);
                let e = sym_eig(&xs)?;
                let em1 = |f: &dyn Fn(f64) -> f64| {
                    let d = Vector::from_iterator(n, e.values.iter().map(|&v| f(v)));
                    &e.vectors * Mat::from_diagonal(&d) * e.vectors.transpose()
                };
                let eh = em1(&|v| (-0.5 * v).exp_m1());
                let half = Mat::identity(n, n) + &eh;
                let w = match &p.log {
                    Some(q) => {
                        let ep = spd_expm1(&sym_part(&self.tangent(q)))?;
                        let xm = &eh * 2.0 + &ep + &eh * &ep + &ep * &eh + &eh * &eh + &eh * &ep * &eh;
                        spd_log1p(&sym_part(&xm))?
                    }
                    None => mat_log_spd(&sym_part(&(&half * &p.point * &half)))?,
                };
                let d2 = 0.5 * trace_prod(&w, &w);
                let m = sym_part(&(&half * &w * &half));
                let d = dexp_symmetric(&xs, &m);
                Ok((d2, self.coords(&d) * -2.0))
            }
            Manifold::So { n } => {
                let xs = skew_part(&x);
                let xe = mat_exp(&xs);
                let l = match (&p.log, n) {
                    (Some(q), 3) => {
                        let e1 = so3_expm1(&(-&xs));
                        let e2 = so3_expm1(&skew_part(&self.tangent(q)));
                        let xm = &e1 + &e2 + &e1 * &e2;
                        so3_log1p(&xm)?
                    }
                    _ => mat_log_rot(&(xe.transpose() * &p.point))?,
                };
                let d2 = 0.5 * l.norm_squared();
                let a = &xe * dexp(&(-&xs), &l);
                Ok((d2, self.coords(&skew_part(&a)) * -2.0))
            }
        }
    }
}

/// A lifted data point, optionally with its log coordinates in the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: Point,
    pub log: Option<Vector>,
}

impl Sample {
    pub fn from_point(point: Point) -> Self {
        Self { point, log: None }
    }
}

fn spd_expm1(x: &Mat) -> Result<Mat> {
    let e = sym_eig(x)?;
    let d = e.values.map(|v| v.exp_m1());
    Ok(&e.vectors * Mat::from_diagonal(&d) * e.vectors.transpose())
}

fn spd_log1p(x: &Mat) -> Result<Mat> {
    let e = sym_eig(x)?;
    if let Some(&v) = e.values.iter().find(|&&v| v <= -1.0) {
        return Err(crate::error::PgaError::NotPositiveDefinite(1.0 + v));
    }
    let d = e.values.map(|v| v.ln_1p());
    Ok(&e.vectors * Mat::from_diagonal(&d) * e.vectors.transpose())
}

/// `exp(X) - I` for `X` in so(3).
fn so3_expm1(x: &Mat) -> Mat {
    let w = vee3(x);
    let t2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    let t = t2.sqrt();
    let (a, b) = if t < 1e-4 {
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        (t.sin() / t, (1.0 - t.cos()) / t2)
    };
    x * a + x * x * b
}

/// `Log(I + X)` for a rotation `I + X`, accurate when `X` is small.
fn so3_log1p(x: &Mat) -> Result<Mat> {
    let k = skew_part(x);
    let w = vee3(&k);
    let sn = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let cs = 1.0 + 0.5 * x.trace();
    let t = sn.atan2(cs);
    if t > 3.0 {
        return mat_log_rot(&(Mat::identity(3, 3) + x));
    }
    let f = if sn < 1e-8 { 1.0 + t * t / 6.0 } else { t / sn };
    Ok(k * f)
}
