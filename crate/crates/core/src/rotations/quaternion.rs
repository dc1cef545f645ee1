use crate::error::{PgaError, Result};
use crate::linalg::{vee3, Mat};
use serde::{Deserialize, Serialize};

/// Unit quaternion `w + xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Fails unless the norm is 1 to within `1e-12`.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let q = Self { w, x, y, z };
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(PgaError::InvalidPoint(format!("quaternion norm {n} is not 1")));
        }
        Ok(q)
    }

    /// Normalizes a nonzero 4-vector.
    pub fn normalized(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(PgaError::InvalidPoint("zero quaternion".into()));
        }
        Ok(Self { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    /// Quaternion of the rotation `exp(hat(omega))`.
    pub fn from_rotation_vector(omega: [f64; 3]) -> Self {
        let theta = (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt();
        let h = 0.5 * theta;
        // sin(h)/theta, with its series near zero
        let s = if theta < 1e-6 { 0.5 - theta * theta / 48.0 } else { h.sin() / theta };
        Self { w: h.cos(), x: omega[0] * s, y: omega[1] * s, z: omega[2] * s }
    }

    /// Rotation vector with angle in `[0, pi]`.
    pub fn to_rotation_vector(&self) -> [f64; 3] {
        let q = if self.w < 0.0 { Self { w: -self.w, x: -self.x, y: -self.y, z: -self.z } } else { *self };
        let sn = (q.x * q.x + q.y * q.y + q.z * q.z).sqrt();
        let theta = 2.0 * sn.atan2(q.w);
        let k = if sn < 1e-300 { 2.0 } else { theta / sn };
        [q.x * k, q.y * k, q.z * k]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

/// Rotation matrix of a unit quaternion.
pub fn from_quaternion(q: &Quaternion) -> Mat {
    let Quaternion { w, x, y, z } = *q;
    Mat::from_row_slice(
        3,
        3,
        &[
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    )
}

/// Unit quaternion of a rotation matrix, with `w >= 0`.
pub fn to_quaternion(r: &Mat) -> Result<Quaternion> {
    if r.shape() != (3, 3) {
        return Err(PgaError::DimensionMismatch("quaternions represent 3x3 rotations".into()));
    }
    let tr = r.trace();
    // pick the numerically largest component first
    let (w, x, y, z) = if tr > r[(0, 0)].max(r[(1, 1)]).max(r[(2, 2)]) {
        let s = 2.0 * (1.0 + tr).sqrt();
        (0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s)
    } else if r[(0, 0)] >= r[(1, 1)] && r[(0, 0)] >= r[(2, 2)] {
        let s = 2.0 * (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt();
        ((r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s)
    } else if r[(1, 1)] >= r[(2, 2)] {
        let s = 2.0 * (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt();
        ((r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s)
    } else {
        let s = 2.0 * (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt();
        ((r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s)
    };
    let q = Quaternion::normalized(w, x, y, z)?;
    Ok(if q.w < 0.0 { Quaternion { w: -q.w, x: -q.x, y: -q.y, z: -q.z } } else { q })
}

/// `Exp_p(t X)` on `SO(3)` through quaternion multiplication,
/// `p` a rotation and `X` tangent at `p`.
pub fn geodesic_eval(p: &Mat, x: &Mat, t: f64) -> Result<Mat> {
    let qp = to_quaternion(p)?;
    let w = vee3(&(p.transpose() * x));
    let qs = Quaternion::from_rotation_vector([w[0] * t, w[1] * t, w[2] * t]);
    Ok(from_quaternion(&qp.mul(&qs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hat3, mat_exp, mat_log_rot};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rotation(rng: &mut ChaCha8Rng) -> Mat {
        let w = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        mat_exp(&hat3(w))
    }

    #[test]
    fn identity_and_quarter_turn() {
        let q = to_quaternion(&Mat::identity(3, 3)).unwrap();
        assert_eq!(q.as_array(), [1.0, 0.0, 0.0, 0.0]);
        let r = mat_exp(&hat3([0.0, 0.0, std::f64::consts::FRAC_PI_2]));
        let q = to_quaternion(&r).unwrap();
        let c = std::f64::consts::FRAC_PI_4.cos();
        let expect = [c, 0.0, 0.0, c];
        for (a, b) in q.as_array().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r = random_rotation(&mut rng);
            let q = to_quaternion(&r).unwrap();
            assert!((q.norm() - 1.0).abs() < 1e-12);
            assert!((from_quaternion(&q) - &r).norm() < 1e-12);
            let back = to_quaternion(&from_quaternion(&q)).unwrap();
            let d = (0..4).map(|i| (back.as_array()[i] - q.as_array()[i]).abs()).fold(0.0, f64::max);
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn multiplication_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_rotation(&mut rng);
        let b = random_rotation(&mut rng);
        let qa = to_quaternion(&a).unwrap();
        let qb = to_quaternion(&b).unwrap();
        assert!((from_quaternion(&qa.mul(&qb)) - &a * &b).norm() < 1e-12);
        assert!((from_quaternion(&qa.conj()) - a.transpose()).norm() < 1e-12);
    }

    #[test]
    fn geodesic_matches_matrix_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_rotation(&mut rng);
        let x = &p * hat3([0.3, -0.7, 0.2]);
        for t in [0.0, 0.5, 1.7] {
            let want = &p * mat_exp(&(p.transpose() * &x * t));
            assert!((geodesic_eval(&p, &x, t).unwrap() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_vector_matches_log() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let r = random_rotation(&mut rng);
            let w = to_quaternion(&r).unwrap().to_rotation_vector();
            let l = vee3(&mat_log_rot(&r).unwrap());
            for i in 0..3 {
                assert!((w[i] - l[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_unit() {
        assert!(Quaternion::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(Quaternion::new(0.0, 0.0, 1.0, 0.0).is_ok());
    }
}
