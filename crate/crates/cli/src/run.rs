use crate::args::{Command, Common, ConvergeModeArg, Format, ManifoldKind, SplitArg, Variant};
use pga_core::experiments::{
    anisotropic_dataset, geometric_std, log_grid, rng_for, run_altpga, run_converge, run_indicators, run_projection_study,
    simulate_rotations, simulate_spd, simulate_sphere, ExperimentConfig,
};
use pga_core::indicators::TauTildeVariant;
use pga_core::io::{read_dataset, read_dataset_file, write_csv, write_json};
use pga_core::manifold::{intrinsic_mean, solve_coefficients};
use pga_core::pga::{exact_pga, expansion, PgaOptions, StandardAlpha, TangentDataset};
use pga_core::rotations::{read_rotations_csv, Split};
use pga_core::{Manifold, PgaError, Point, Result, Tolerances};
use serde::Serialize;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

/// Scale of synthetic data for the dataset commands.
const SYNTHETIC_SCALE: f64 = 0.3;

fn kind(c: &Common, default: ManifoldKind) -> ManifoldKind {
    c.manifold.unwrap_or(default)
}

fn manifold_or(c: &Common, default: ManifoldKind, default_dim: usize) -> Result<Manifold> {
    let n = c.dim.unwrap_or(default_dim);
    match kind(c, default) {
        ManifoldKind::Sphere => Manifold::sphere(n, c.radius),
        ManifoldKind::Spd => Manifold::spd(n),
        ManifoldKind::So => Manifold::so(n),
    }
}

fn manifold(c: &Common, default_dim: usize) -> Result<Manifold> {
    manifold_or(c, ManifoldKind::Sphere, default_dim)
}

fn config(c: &Common, m: Manifold, n_samples: usize, eps: Vec<f64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(m, c.n_samples.unwrap_or(n_samples), c.seed);
    cfg.eps_grid = c.eps_grid.clone().unwrap_or(eps);
    if let Some(k) = &c.kappa_grid {
        cfg.kappa_grid = k.clone();
    }
    if let Some(r) = c.runs {
        cfg.runs = r;
    }
    cfg.recenter = !c.no_recenter;
    cfg
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| PgaError::Io(format!("{}: {e}", path.display())))
}

/// The input dataset, or a synthetic centered anisotropic one.
fn dataset(c: &Common) -> Result<TangentDataset> {
    match &c.input {
        Some(p) => read_dataset(open(p)?, &Tolerances::default()),
        None => {
            let m = manifold(c, 3)?;
            let std: Vec<f64> = geometric_std(m.dim(), 20.0).iter().map(|s| s * SYNTHETIC_SCALE).collect();
            anisotropic_dataset(m, c.n_samples.unwrap_or(20), &std, !c.no_recenter, &mut rng_for(c.seed, 0))
        }
    }
}

fn input_points(c: &Common, m: Manifold) -> Result<Option<Vec<Point>>> {
    let Some(p) = &c.input else { return Ok(None) };
    if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        if m != (Manifold::So { n: 3 }) {
            return Err(PgaError::InvalidInput("rotation CSV input needs --manifold so --dim 3".into()));
        }
        return Ok(Some(read_rotations_csv(open(p)?)?.0));
    }
    let file = read_dataset_file(open(p)?)?;
    if file.manifold()? != m {
        return Err(PgaError::InvalidInput(format!("input holds {}, expected {}", file.manifold()?.name(), m.name())));
    }
    match file.points {
        Some(_) => Ok(Some(file.points()?)),
        None => Ok(Some(file.to_dataset(&Tolerances::default())?.points())),
    }
}

struct Table {
    name: &'static str,
    csv: Vec<u8>,
}

fn table<T: Serialize>(name: &'static str, rows: &[T]) -> Result<Table> {
    let mut csv = Vec::new();
    write_csv(&mut csv, rows)?;
    Ok(Table { name, csv })
}

fn emit<T: Serialize>(c: &Common, report: &T, tables: Vec<Table>) -> Result<()> {
    let mut buf = Vec::new();
    match c.format {
        Format::Json => write_json(&mut buf, report)?,
        Format::Csv => {
            for (i, t) in tables.iter().enumerate() {
                if i == 0 {
                    buf.extend_from_slice(&t.csv);
                    continue;
                }
                match &c.output {
                    Some(p) => {
                        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
                        std::fs::write(p.with_file_name(format!("{stem}.{}.csv", t.name)), &t.csv)?;
                    }
                    None => {
                        buf.extend_from_slice(format!("\n# {}\n", t.name).as_bytes());
                        buf.extend_from_slice(&t.csv);
                    }
                }
            }
        }
    }
    match &c.output {
        Some(p) => std::fs::write(p, &buf).map_err(|e| PgaError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(&buf).and_then(|_| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

#[derive(Serialize)]
struct MeanOut {
    manifold: Manifold,
    mean: Vec<f64>,
    iterations: usize,
    stationarity: f64,
}

/// A table of numeric columns whose count is known only at run time.
fn numeric_table(name: &'static str, header: Vec<String>, rows: &[Vec<f64>]) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| PgaError::Io(format!("CSV write error: {e}"));
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:?}"))).map_err(io)?;
    }
    let csv = w.into_inner().map_err(|e| PgaError::Io(e.to_string()))?;
    Ok(Table { name, csv })
}

fn vector_table(name: &'static str, prefix: &str, vs: &[Vec<f64>]) -> Result<Table> {
    let width = vs.first().map_or(0, Vec::len);
    let header = std::iter::once("index".to_string()).chain((1..=width).map(|j| format!("{prefix}{j}"))).collect();
    let rows: Vec<Vec<f64>> = vs.iter().enumerate().map(|(i, v)| std::iter::once((i + 1) as f64).chain(v.iter().copied()).collect()).collect();
    numeric_table(name, header, &rows)
}

fn flat(x: &pga_core::linalg::Mat) -> Vec<f64> {
    if x.ncols() == 1 {
        x.iter().copied().collect()
    } else {
        x.transpose().iter().copied().collect()
    }
}

#[derive(Serialize)]
struct PgaOut {
    manifold: Manifold,
    /// Frame coordinates at the mean.
    directions: Vec<Vec<f64>>,
    /// Tangents at the mean, flattened row-major.
    direction_tangents: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    converged: Vec<bool>,
    ties: Vec<bool>,
}

#[derive(Serialize)]
struct ProjectRow {
    index: usize,
    sqdist: f64,
    coeffs: Vec<f64>,
}

#[derive(Serialize)]
struct ProjectOut {
    manifold: Manifold,
    k: usize,
    directions: Vec<Vec<f64>>,
    rows: Vec<ProjectRow>,
}

#[derive(Serialize)]
struct ExpandOut {
    manifold: Manifold,
    k: usize,
    eps: f64,
    beta: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    alpha: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
    corrected: Vec<Vec<f64>>,
}

fn vecs(vs: &[pga_core::linalg::Vector]) -> Vec<Vec<f64>> {
    vs.iter().map(|v| v.iter().copied().collect()).collect()
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Converge { common, directions, mode, k } => {
            let m = manifold(&common, if kind(&common, ManifoldKind::Sphere) == ManifoldKind::Sphere { 10 } else { 3 })?;
            match mode {
                ConvergeModeArg::Directions => {
                    let n = if m.is_sphere() { 50 } else { 75 };
                    let cfg = config(&common, m, n, log_grid(10f64.powf(-2.5), 10f64.powf(-0.5), 9));
                    let ks = directions.unwrap_or_else(|| {
                        let d = if m.is_sphere() { vec![1, 2, 4, 9] } else { vec![1, 2] };
                        d.into_iter().filter(|&k| k <= m.dim()).collect()
                    });
                    let r = run_converge(&cfg, &ks)?;
                    emit(&common, &r, vec![table("rows", &r.rows)?, table("slopes", &r.slopes)?])
                }
                ConvergeModeArg::Projection => {
                    let cfg = config(&common, m, 50, log_grid(1e-3, 1e-1, 9));
                    let r = run_projection_study(&cfg, k)?;
                    emit(&common, &r, vec![table("rows", &r.projection_rows)?, table("slopes", &r.slopes)?])
                }
            }
        }
        Command::SimulateSphere { common, variance_ratio } => {
            let m = manifold(&common, 15)?;
            let mut cfg = config(&common, m, 100, vec![1.0, 2.0]);
            cfg.eps_grid = vec![0.5, 1.0];
            let r = simulate_sphere(&cfg, variance_ratio)?;
            emit(&common, &r, vec![table("rows", &r.rows)?])
        }
        Command::Altpga { common, k_max, std, recenter_steps } => {
            let m = manifold_or(&common, ManifoldKind::So, 3)?;
            let pts = match input_points(&common, m)? {
                Some(p) => p,
                None => {
                    let std = std.unwrap_or_else(|| {
                        let d = m.dim();
                        geometric_std(d, 20.0).iter().map(|s| s * 0.4).collect()
                    });
                    simulate_rotations(m, common.n_samples.unwrap_or(50), &std, common.seed)?
                }
            };
            let split = common.altpga_split.map(|s| match s {
                SplitArg::Half => Split::Half,
                SplitArg::Left => Split::Left,
            });
            let r = run_altpga(&pts, k_max, split, recenter_steps)?;
            emit(&common, &r, vec![table("rows", &r.rows)?])
        }
        Command::Indicators { common, subsample, repeats, std } => {
            let m = manifold_or(&common, ManifoldKind::Spd, 3)?;
            let pts = match input_points(&common, m)? {
                Some(p) => p,
                None => {
                    let d = m.dim();
                    let std = std.unwrap_or_else(|| geometric_std(d, 20.0).iter().map(|s| s * 0.5).collect());
                    let n = common.n_samples.unwrap_or(36);
                    match m {
                        Manifold::Spd { .. } => simulate_spd(m, n, &std, common.seed)?,
                        Manifold::So { .. } => simulate_rotations(m, n, &std, common.seed)?,
                        _ => return Err(PgaError::UnsupportedManifold(m.name())),
                    }
                }
            };
            let variant = match common.indicator_variant {
                Variant::Component => TauTildeVariant::Component,
                Variant::Full => TauTildeVariant::Full,
                Variant::Squared => TauTildeVariant::Squared,
            };
            let r = run_indicators(m, &pts, subsample, repeats, common.seed, variant)?;
            emit(&common, &r, vec![table("rows", &r.rows)?, table("correlations", &r.correlations)?])
        }
        Command::Mean { common } => {
            let ds = dataset(&common)?;
            let m = ds.manifold();
            let pts = match input_points(&common, m)? {
                Some(p) => p,
                None => ds.points(),
            };
            let r = intrinsic_mean(&m, &pts)?;
            let out = MeanOut { manifold: m, mean: flat(&r.mean), iterations: r.iterations, stationarity: r.stationarity };
            let t = vector_table("mean", "x", std::slice::from_ref(&out.mean))?;
            emit(&common, &out, vec![t])
        }
        Command::Pga { common, k, check_ties } => {
            let ds = dataset(&common)?;
            let mut opts = PgaOptions::new(k);
            opts.check_ties = check_ties;
            let r = exact_pga(&ds, &opts)?;
            let out = PgaOut {
                manifold: ds.manifold(),
                directions: vecs(&r.directions),
                direction_tangents: r.directions.iter().map(|d| flat(&ds.frame().tangent_at_mu(d))).collect(),
                residuals: r.residuals,
                converged: r.converged,
                ties: r.ties,
            };
            let t = vector_table("directions", "c", &out.directions)?;
            emit(&common, &out, vec![t])
        }
        Command::Project { common, k } => {
            let ds = dataset(&common)?;
            let dirs = exact_pga(&ds, &PgaOptions::new(k))?.directions;
            let mut rows = Vec::with_capacity(ds.len());
            for (i, s) in ds.samples().iter().enumerate() {
                let sol = solve_coefficients(ds.frame(), &dirs, s, None)?;
                if !sol.converged {
                    return Err(PgaError::NonConvergence(format!("projection of point {}", i + 1)));
                }
                rows.push(ProjectRow { index: i + 1, sqdist: sol.sqdist, coeffs: sol.coeffs.iter().copied().collect() });
            }
            let header = ["index", "sqdist"].iter().map(|s| s.to_string()).chain((1..=k).map(|j| format!("t{j}"))).collect();
            let flat_rows: Vec<Vec<f64>> =
                rows.iter().map(|r| [r.index as f64, r.sqdist].into_iter().chain(r.coeffs.iter().copied()).collect()).collect();
            let csv = numeric_table("projections", header, &flat_rows)?;
            let out = ProjectOut { manifold: ds.manifold(), k, directions: vecs(&dirs), rows };
            emit(&common, &out, vec![csv])
        }
        Command::Expand { common, k, eps } => {
            let ds = dataset(&common)?;
            let e = expansion(&ds, k, &StandardAlpha::default(), &Tolerances::default())?;
            let corrected: Vec<pga_core::linalg::Vector> = (0..k).map(|j| e.corrected(j, eps)).collect();
            let out = ExpandOut {
                manifold: ds.manifold(),
                k,
                eps,
                beta: e.beta.iter().copied().collect(),
                eigenvectors: vecs(&e.u[..k]),
                alpha: e.alpha.row_iter().map(|r| r.iter().copied().collect()).collect(),
                c: e.c.row_iter().take(k).map(|r| r.iter().copied().collect()).collect(),
                corrected: vecs(&corrected),
            };
            let t = vector_table("corrected", "c", &out.corrected)?;
            emit(&common, &out, vec![t])
        }
    }
}
