use super::{Frame, Manifold, Point, Tangent};
use crate::error::{PgaError, Result};
use crate::linalg::{commutator, Mat};

/// `R(x, y) z = [z, [x, y]]` for tangents at the identity of `P(n)` or `SO(n)`.
pub fn curvature_op(x: &Mat, y: &Mat, z: &Mat) -> Mat {
    commutator(z, &commutator(x, y))
}

/// `<R(x, y) w, z>` at the lifted base of `frame`.
///
/// On the sphere this is `(<x,z><y,w> - <x,w><y,z>) * 4 / r^2`, the same
/// normalization as the matrix spaces' bracket formula.
pub fn riemann_tensor(frame: &Frame, x: &Mat, y: &Mat, w: &Mat, z: &Mat) -> f64 {
    match frame.manifold() {
        Manifold::Sphere { r, .. } => 4.0 / (r * r) * (x.dot(z) * y.dot(w) - x.dot(w) * y.dot(z)),
        _ => frame.inner(&curvature_op(x, y, w), z),
    }
}

/// Sectional curvature of the plane spanned by `x, y` at `p`.
pub fn sectional_curvature(m: &Manifold, p: &Point, x: &Tangent, y: &Tangent) -> Result<f64> {
    m.check_tangent(p, x)?;
    m.check_tangent(p, y)?;
    let xx = m.metric(p, x, x)?;
    let yy = m.metric(p, y, y)?;
    let xy = m.metric(p, x, y)?;
    let area = xx * yy - xy * xy;
    if area <= 1e-14 * (xx * yy).max(f64::MIN_POSITIVE) {
        return Err(PgaError::DegeneratePlane(area));
    }
    match *m {
        Manifold::Sphere { r, .. } => Ok(1.0 / (r * r)),
        _ => {
            let f = Frame::new(*m, p.clone())?;
            let (a, b) = (f.lift_tangent(x), f.lift_tangent(y));
            // the bracket form carries a factor 4 over the Levi-Civita tensor
            Ok(riemann_tensor(&f, &a, &b, &b, &a) / (4.0 * area))
        }
    }
}
