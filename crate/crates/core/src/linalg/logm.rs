use super::{hat3, is_symmetric, skew_part, sym_eig, sym_part, vee3, Mat, Vector};
use crate::error::{PgaError, Result};
use std::f64::consts::PI;

/// Principal logarithm of a symmetric positive-definite matrix.
pub fn mat_log_spd(p: &Mat) -> Result<Mat> {
    if !is_symmetric(p) {
        return Err(PgaError::InvalidPoint("mat_log_spd: matrix is not symmetric".into()));
    }
    let e = sym_eig(p)?;
    let min = e.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(PgaError::NotPositiveDefinite(min));
    }
    let d = Vector::from_iterator(e.values.len(), e.values.iter().map(|x| x.ln()));
    Ok(sym_part(&(&e.vectors * Mat::from_diagonal(&d) * e.vectors.transpose())))
}

/// Square root of a symmetric positive-definite matrix and its inverse.
pub fn spd_sqrt(p: &Mat) -> Result<(Mat, Mat)> {
    let e = sym_eig(p)?;
    let min = e.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(PgaError::NotPositiveDefinite(min));
    }
    let n = e.values.len();
    let s = Vector::from_iterator(n, e.values.iter().map(|x| x.sqrt()));
    let si = Vector::from_iterator(n, e.values.iter().map(|x| 1.0 / x.sqrt()));
    let root = sym_part(&(&e.vectors * Mat::from_diagonal(&s) * e.vectors.transpose()));
    let inv = sym_part(&(&e.vectors * Mat::from_diagonal(&si) * e.vectors.transpose()));
    Ok((root, inv))
}

/// Rotation angle of a 3x3 rotation, in `[0, pi]`.
pub fn rotation_angle_so3(r: &Mat) -> f64 {
    let w = vee3(&skew_part(r));
    let s = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let c = 0.5 * (r.trace() - 1.0);
    s.atan2(c)
}

const CUT_TOL: f64 = 1e-8;

fn check_rotation(r: &Mat) -> Result<()> {
    let n = r.nrows();
    if !r.is_square() {
        return Err(PgaError::InvalidPoint("rotation must be square".into()));
    }
    let orth = (r.transpose() * r - Mat::identity(n, n)).norm();
    if orth > 1e-8 {
        return Err(PgaError::InvalidPoint(format!("matrix is not orthogonal (|R^T R - I| = {orth:e})")));
    }
    if r.determinant() < 0.0 {
        return Err(PgaError::InvalidPoint("rotation has determinant -1".into()));
    }
    Ok(())
}

fn log_so3(r: &Mat) -> Result<Mat> {
    let theta = rotation_angle_so3(r);
    if PI - theta < CUT_TOL {
        return Err(PgaError::CutLocus(format!("rotation angle {theta} is pi")));
    }
    if theta > 3.0 {
        // axis from the symmetric part; the skew part is too small to carry it
        let c = theta.cos();
        let b = sym_part(r) - Mat::identity(3, 3) * c;
        let i = (0..3)
            .max_by(|&a, &b2| b[(a, a)].partial_cmp(&b[(b2, b2)]).unwrap())
            .unwrap();
        let col = b.column(i).into_owned();
        let mut axis = col.normalize();
        let w = vee3(&skew_part(r));
        if axis[0] * w[0] + axis[1] * w[1] + axis[2] * w[2] < 0.0 {
            axis = -axis;
        }
        return Ok(hat3([axis[0] * theta, axis[1] * theta, axis[2] * theta]));
    }
    let factor = if theta < 1e-4 {
        let t2 = theta * theta;
        0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
    } else {
        0.5 * theta / theta.sin()
    };
    Ok((r - r.transpose()) * factor)
}

fn log_so_general(r: &Mat) -> Result<Mat> {
    let n = r.nrows();
    let e = sym_eig(&sym_part(r))?;
    let min_cos = e.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if 1.0 + min_cos <= 0.5 * CUT_TOL * CUT_TOL {
        return Err(PgaError::CutLocus("a rotation angle equals pi".into()));
    }
    // inverse scaling and squaring with Denman-Beavers square roots
    let id = Mat::identity(n, n);
    let mut y = r.clone();
    let mut k = 0;
    while (&y - &id).norm() > 0.1 {
        let mut z = id.clone();
        let mut yy = y.clone();
        for _ in 0..100 {
            let yi = yy.clone().try_inverse().ok_or_else(|| {
                PgaError::NonConvergence("square root iteration hit a singular matrix".into())
            })?;
            let zi = z.clone().try_inverse().ok_or_else(|| {
                PgaError::NonConvergence("square root iteration hit a singular matrix".into())
            })?;
            let ny = (&yy + &zi) * 0.5;
            let nz = (&z + &yi) * 0.5;
            let done = (&ny - &yy).norm() <= 1e-15 * ny.norm();
            yy = ny;
            z = nz;
            if done {
                break;
            }
        }
        y = yy;
        k += 1;
        if k > 60 {
            return Err(PgaError::NonConvergence("log: too many square roots".into()));
        }
    }
    let a = &y - &id;
    let mut term = a.clone();
    let mut sum = a.clone();
    for m in 2..200 {
        term = -(&term * &a);
        let add = &term / m as f64;
        sum += &add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(skew_part(&(sum * 2f64.powi(k))))
}

/// Principal logarithm of a special orthogonal matrix.
///
/// Fails with `CutLocus` when a rotation angle is within `1e-8` of pi.
pub fn mat_log_rot(r: &Mat) -> Result<Mat> {
    check_rotation(r)?;
    match r.nrows() {
        1 => Ok(Mat::zeros(1, 1)),
        2 => {
            let theta = r[(1, 0)].atan2(r[(0, 0)]);
            if PI - theta.abs() < CUT_TOL {
                return Err(PgaError::CutLocus(format!("rotation angle {theta} is pi")));
            }
            Ok(Mat::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]))
        }
        3 => log_so3(r),
        _ => log_so_general(r),
    }
}
