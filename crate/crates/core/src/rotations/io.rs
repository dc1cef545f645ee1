use super::quaternion::{from_quaternion, to_quaternion, Quaternion};
use crate::error::{PgaError, Result};
use crate::linalg::Mat;
use crate::manifold::Manifold;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Column layout of a rotation CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationFormat {
    /// `w,x,y,z`.
    Quaternion,
    /// Nine entries of the 3x3 matrix, row-major.
    Matrix,
}

fn schema(row: usize, message: impl Into<String>) -> PgaError {
    PgaError::Schema { field: format!("row {row}"), message: message.into() }
}

/// Reads rotations from CSV with 4 (quaternion) or 9 (row-major matrix)
/// columns. A non-numeric first row is treated as a header. Quaternions are
/// normalized; matrices must be rotations to `1e-8`.
pub fn read_rotations_csv<R: Read>(reader: R) -> Result<(Vec<Mat>, RotationFormat)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    let mut format = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| PgaError::Io(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        let vals = match vals {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(schema(i + 1, e.to_string())),
        };
        let f = match vals.len() {
            4 => RotationFormat::Quaternion,
            9 => RotationFormat::Matrix,
            n => return Err(schema(i + 1, format!("expected 4 or 9 columns, found {n}"))),
        };
        if *format.get_or_insert(f) != f {
            return Err(schema(i + 1, "column count changes between rows"));
        }
        let r = match f {
            RotationFormat::Quaternion => {
                let q = Quaternion::normalized(vals[0], vals[1], vals[2], vals[3]).map_err(|e| schema(i + 1, e.to_string()))?;
                from_quaternion(&q)
            }
            RotationFormat::Matrix => {
                let r = Mat::from_row_slice(3, 3, &vals);
                let m = Manifold::So { n: 3 };
                let defect = (r.transpose() * &r - Mat::identity(3, 3)).norm();
                if defect > 1e-8 || r.determinant() <= 0.0 {
                    return Err(schema(i + 1, format!("not a rotation (orthogonality defect {defect:e})")));
                }
                // snap to the nearest rotation so downstream checks pass
                let svd = r.svd(true, true);
                let snapped = svd.u.unwrap() * svd.v_t.unwrap();
                m.check_point(&snapped).map_err(|e| schema(i + 1, e.to_string()))?;
                snapped
            }
        };
        out.push(r);
    }
    match format {
        Some(f) => Ok((out, f)),
        None => Err(PgaError::InvalidInput("no rotations in input".into())),
    }
}

/// Writes rotations with a header row, in the layout read back by
/// [`read_rotations_csv`].
pub fn write_rotations_csv<W: Write>(writer: W, rotations: &[Mat], format: RotationFormat) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| PgaError::Io(e.to_string());
    match format {
        RotationFormat::Quaternion => w.write_record(["w", "x", "y", "z"]).map_err(io)?,
        RotationFormat::Matrix => w
            .write_record(["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"])
            .map_err(io)?,
    }
    for r in rotations {
        let row: Vec<String> = match format {
            RotationFormat::Quaternion => to_quaternion(r)?.as_array().iter().map(|v| v.to_string()).collect(),
            RotationFormat::Matrix => {
                if r.shape() != (3, 3) {
                    return Err(PgaError::DimensionMismatch("rotation CSV holds 3x3 matrices".into()));
                }
                (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|ij| r[ij].to_string()).collect()
            }
        };
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hat3, mat_exp};

    fn rotations() -> Vec<Mat> {
        vec![Mat::identity(3, 3), mat_exp(&hat3([0.1, -0.4, 0.9])), mat_exp(&hat3([-2.0, 0.5, 0.3]))]
    }

    #[test]
    fn round_trip_both_layouts() {
        for f in [RotationFormat::Quaternion, RotationFormat::Matrix] {
            let mut buf = Vec::new();
            write_rotations_csv(&mut buf, &rotations(), f).unwrap();
            let (back, got) = read_rotations_csv(buf.as_slice()).unwrap();
            assert_eq!(got, f);
            for (a, b) in back.iter().zip(rotations()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn headerless_quaternions() {
        let (r, _) = read_rotations_csv("1,0,0,0\n0.7071067811865476,0,0,0.7071067811865476\n".as_bytes()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[1][(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_rows() {
        assert!(read_rotations_csv("1,0,0\n".as_bytes()).is_err());
        assert!(read_rotations_csv("w,x,y,z\n1,0,0,0\n1,2,3,4,5,6,7,8,9\n".as_bytes()).is_err());
        assert!(read_rotations_csv("2,0,0,0,1,0,0,0,1\n".as_bytes()).is_err());
        assert!(read_rotations_csv("w,x,y,z\n1,0,a,0\n".as_bytes()).is_err());
    }
}
