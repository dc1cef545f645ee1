use super::{expm_pade, is_symmetric, sym_eig, Mat};

/// Directional derivative of the matrix exponential at `x` in direction `v`.
///
/// Symmetric `x` uses the Daleckii-Krein divided-difference formula on the
/// eigendecomposition; everything else reads the upper-right block of
/// `exp([[x, v], [0, x]])`.
pub fn dexp(x: &Mat, v: &Mat) -> Mat {
    if is_symmetric(x) {
        dexp_symmetric(x, v)
    } else {
        dexp_block(x, v)
    }
}

pub fn dexp_block(x: &Mat, v: &Mat) -> Mat {
    let n = x.nrows();
    let mut big = Mat::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(x);
    big.view_mut((n, n), (n, n)).copy_from(x);
    big.view_mut((0, n), (n, n)).copy_from(v);
    let e = expm_pade(&big);
    e.view((0, n), (n, n)).into_owned()
}

/// `(e^a - e^b) / (a - b)`, continuous across `a == b`.
fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let h = 0.5 * (a - b);
    let sinhc = if h.abs() < 1e-4 {
        1.0 + h * h / 6.0 + h.powi(4) / 120.0
    } else {
        h.sinh() / h
    };
    (0.5 * (a + b)).exp() * sinhc
}

pub fn dexp_symmetric(x: &Mat, v: &Mat) -> Mat {
    let e = sym_eig(x).expect("symmetric input");
    let q = &e.vectors;
    let vh = q.transpose() * v * q;
    let n = x.nrows();
    let g = Mat::from_fn(n, n, |i, j| vh[(i, j)] * exp_divided_difference(e.values[i], e.values[j]));
    q * g * q.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hat3, mat_exp};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn central_difference(x: &Mat, v: &Mat, h: f64) -> Mat {
        (mat_exp(&(x + v * h)) - mat_exp(&(x - v * h))) / (2.0 * h)
    }

    #[test]
    fn at_zero_is_identity_map() {
        let v = Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!((dexp(&Mat::zeros(2, 2), &v) - &v).norm() < 1e-15);
        assert!((dexp_block(&Mat::zeros(2, 2), &v) - &v).norm() < 1e-15);
    }

    #[test]
    fn commuting_directions() {
        let x = Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.3]);
        let v = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let want = mat_exp(&x) * &v;
        assert!((dexp(&x, &v) - &want).norm() < 1e-14);
        let k = hat3([0.0, 0.0, 0.8]);
        let kv = hat3([0.0, 0.0, 1.0]);
        assert!((dexp(&k, &kv) - mat_exp(&k) * &kv).norm() < 1e-14);
    }

    #[test]
    fn matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = if trial % 2 == 0 { 3 } else { 5 };
            let a = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let b = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let (x, v) = match trial % 3 {
                0 => (&a + a.transpose(), &b + b.transpose()),
                1 => (&a - a.transpose(), &b - b.transpose()),
                _ => (a.clone(), b.clone()),
            };
            let d = dexp(&x, &v);
            let fd = central_difference(&x, &v, 1e-5);
            let rel = (&d - &fd).norm() / d.norm();
            assert!(rel < 1e-6, "trial {trial}: rel {rel}");
            if trial % 3 == 0 {
                let blk = dexp_block(&x, &v);
                assert!((&blk - &d).norm() < 1e-11 * d.norm());
            }
        }
    }
}
