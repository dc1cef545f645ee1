use super::{is_skew, is_symmetric, sym_eig, vee3, Mat, Vector};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(a: &Mat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm_pade(a: &Mat) -> Mat {
    let n = a.nrows();
    let nrm = norm1(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a / 2f64.powi(s);
    let id = Mat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Exponential of a symmetric matrix through its eigendecomposition.
pub fn expm_symmetric(a: &Mat) -> Mat {
    let e = sym_eig(a).expect("symmetric input");
    let d = Vector::from_iterator(e.values.len(), e.values.iter().map(|x| x.exp()));
    let r = &e.vectors * Mat::from_diagonal(&d) * e.vectors.transpose();
    (&r + r.transpose()) * 0.5
}

/// Rodrigues formula for a 3x3 skew matrix.
pub fn rodrigues(x: &Mat) -> Mat {
    let w = vee3(x);
    let theta = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let x2 = x * x;
    let (a, b) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Mat::identity(3, 3) + x * a + x2 * b
}

/// Matrix exponential, dispatching on structure: eigendecomposition for
/// symmetric input, Rodrigues for 3x3 skew input, Padé otherwise.
pub fn mat_exp(x: &Mat) -> Mat {
    assert!(x.is_square(), "mat_exp needs a square matrix");
    if x.norm() == 0.0 {
        return Mat::identity(x.nrows(), x.nrows());
    }
    if is_symmetric(x) {
        expm_symmetric(x)
    } else if x.nrows() == 3 && is_skew(x) {
        rodrigues(x)
    } else {
        expm_pade(x)
    }
}
