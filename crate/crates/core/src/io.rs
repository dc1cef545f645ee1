//! JSON datasets and report writers.
//!
//! A dataset file names the manifold and its parameters and holds either
//! the mean with tangents at it, or raw points (the mean and logs are then
//! computed on load). Matrices are flattened row-major; sphere points and
//! tangents are ambient vectors of length `n + 1`.
//!
//! ```json
//! {"manifold": "spd", "params": {"n": 2}, "mu": [1, 0, 0, 1],
//!  "tangents": [[0.1, 0.2, 0.2, -0.3], [-0.1, -0.2, -0.2, 0.3]]}
//! ```

use crate::config::Tolerances;
use crate::error::{PgaError, Result};
use crate::linalg::Mat;
use crate::manifold::{Manifold, Point};
use crate::pga::TangentDataset;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldParams {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub manifold: String,
    pub params: ManifoldParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangents: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> PgaError {
    PgaError::Schema { field: field.into(), message: message.into() }
}

impl DatasetFile {
    pub fn manifold(&self) -> Result<Manifold> {
        let p = &self.params;
        let m = match self.manifold.as_str() {
            "sphere" => Manifold::sphere(p.n, p.r.unwrap_or(1.0)),
            "spd" => Manifold::spd(p.n),
            "so" => Manifold::so(p.n),
            other => return Err(schema("manifold", format!("unknown manifold {other:?} (expected sphere, spd or so)"))),
        };
        m.map_err(|e| schema("params", e.to_string()))
    }

    fn to_mat(m: Manifold, field: &str, v: &[f64]) -> Result<Mat> {
        let (r, c) = m.shape();
        if v.len() != r * c {
            return Err(schema(field, format!("expected {} numbers, found {}", r * c, v.len())));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(schema(field, "non-finite entry"));
        }
        Ok(if c == 1 { Mat::from_column_slice(r, 1, v) } else { Mat::from_row_slice(r, c, v) })
    }

    /// Validated points (points-only files).
    pub fn points(&self) -> Result<Vec<Point>> {
        let m = self.manifold()?;
        let pts = self.points.as_ref().ok_or_else(|| schema("points", "missing"))?;
        pts.iter()
            .enumerate()
            .map(|(i, v)| {
                let f = format!("points[{i}]");
                let p = Self::to_mat(m, &f, v)?;
                m.check_point(&p).map_err(|e| schema(&f, e.to_string()))?;
                Ok(p)
            })
            .collect()
    }

    pub fn to_dataset(&self, tol: &Tolerances) -> Result<TangentDataset> {
        let m = self.manifold()?;
        match (&self.mu, &self.tangents, &self.points) {
            (Some(mu), Some(t), None) => {
                let mu = Self::to_mat(m, "mu", mu)?;
                m.check_point(&mu).map_err(|e| schema("mu", e.to_string()))?;
                let mut mats = Vec::with_capacity(t.len());
                for (i, v) in t.iter().enumerate() {
                    let f = format!("tangents[{i}]");
                    let x = Self::to_mat(m, &f, v)?;
                    m.check_tangent(&mu, &x).map_err(|e| schema(&f, e.to_string()))?;
                    mats.push(x);
                }
                if mats.is_empty() {
                    return Err(schema("tangents", "empty"));
                }
                TangentDataset::from_tangents(m, mu, &mats)
            }
            (None, None, Some(_)) => {
                let pts = self.points()?;
                if pts.is_empty() {
                    return Err(schema("points", "empty"));
                }
                TangentDataset::from_points(m, &pts, tol)
            }
            _ => Err(schema("dataset", "give either \"mu\" with \"tangents\", or \"points\"")),
        }
    }

    pub fn from_dataset(ds: &TangentDataset) -> Self {
        let m = ds.manifold();
        let flat = |x: &Mat| -> Vec<f64> {
            if x.ncols() == 1 {
                x.iter().copied().collect()
            } else {
                x.transpose().iter().copied().collect()
            }
        };
        let (name, params) = match m {
            Manifold::Sphere { n, r } => ("sphere", ManifoldParams { n, r: Some(r) }),
            Manifold::Spd { n } => ("spd", ManifoldParams { n, r: None }),
            Manifold::So { n } => ("so", ManifoldParams { n, r: None }),
        };
        Self {
            manifold: name.into(),
            params,
            mu: Some(flat(ds.frame().mu())),
            tangents: Some(ds.tangent_matrices().iter().map(flat).collect()),
            points: None,
        }
    }
}

fn json_error(e: serde_json::Error) -> PgaError {
    if e.is_io() {
        PgaError::Io(e.to_string())
    } else {
        schema(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    }
}

pub fn read_dataset_file<R: Read>(reader: R) -> Result<DatasetFile> {
    serde_json::from_reader(reader).map_err(json_error)
}

pub fn read_dataset<R: Read>(reader: R, tol: &Tolerances) -> Result<TangentDataset> {
    read_dataset_file(reader)?.to_dataset(tol)
}

pub fn write_dataset<W: Write>(writer: W, ds: &TangentDataset) -> Result<()> {
    write_json(writer, &DatasetFile::from_dataset(ds))
}

/// Pretty JSON with shortest round-trip float formatting.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value).map_err(json_error)?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// One CSV row per record, header from the field names.
pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| PgaError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use crate::manifold::{intrinsic_mean, Frame};

    #[test]
    fn dataset_round_trip() {
        for m in [Manifold::sphere(3, 2.0).unwrap(), Manifold::spd(2).unwrap(), Manifold::so(3).unwrap()] {
            let d = m.dim();
            let t = (0..4).map(|i| Vector::from_fn(d, |j, _| ((i * 7 + j * 3) as f64).sin() * 0.3)).collect();
            let ds = TangentDataset::new(Frame::new(m, m.base_point()).unwrap(), t).unwrap();
            let mut buf = Vec::new();
            write_dataset(&mut buf, &ds).unwrap();
            let back = read_dataset(buf.as_slice(), &Tolerances::default()).unwrap();
            assert_eq!(back.manifold(), m);
            for (a, b) in back.tangents().iter().zip(ds.tangents()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bad_sphere_point_names_field() {
        let j = r#"{"manifold":"sphere","params":{"n":2,"r":1.0},"points":[[0,0,1],[0,0.5,0.5]]}"#;
        match read_dataset(j.as_bytes(), &Tolerances::default()) {
            Err(PgaError::Schema { field, .. }) => assert_eq!(field, "points[1]"),
            other => panic!("{other:?}"),
        }
        let j = r#"{"manifold":"torus","params":{"n":2},"points":[[1]]}"#;
        assert!(matches!(read_dataset(j.as_bytes(), &Tolerances::default()), Err(PgaError::Schema { .. })));
        let j = r#"{"manifold":"spd","params":{"n":2},"mu":[1,0,0,1]"#;
        assert!(matches!(read_dataset(j.as_bytes(), &Tolerances::default()), Err(PgaError::Schema { .. })));
    }

    #[test]
    fn points_only_file_uses_intrinsic_mean() {
        let m = Manifold::spd(2).unwrap();
        let pts: Vec<Vec<f64>> = vec![vec![2.0, 0.3, 0.3, 1.0], vec![1.0, -0.2, -0.2, 0.7], vec![1.5, 0.0, 0.0, 2.0]];
        let file = DatasetFile {
            manifold: "spd".into(),
            params: ManifoldParams { n: 2, r: None },
            mu: None,
            tangents: None,
            points: Some(pts),
        };
        let ds = file.to_dataset(&Tolerances::default()).unwrap();
        let mean = intrinsic_mean(&m, &file.points().unwrap()).unwrap().mean;
        assert!((ds.frame().mu() - mean).norm() < 1e-9);
    }
}
