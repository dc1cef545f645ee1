use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "pga", version, about = "Principal geodesic analysis experiments on spheres, P(n) and SO(n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ManifoldKind {
    Sphere,
    Spd,
    So,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Component,
    Full,
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Half,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvergeModeArg {
    Directions,
    Projection,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Defaults to so for altpga, spd for indicators, sphere otherwise.
    #[arg(long, value_enum)]
    pub manifold: Option<ManifoldKind>,
    /// n in S^n, P(n) or SO(n) (default depends on the command).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub kappa_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// JSON dataset, or rotation CSV for `altpga`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report path (stdout when omitted). Extra CSV tables go next to it.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Keep generated tangents uncentered.
    #[arg(long)]
    pub no_recenter: bool,
    #[arg(long, value_enum, default_value = "component")]
    pub indicator_variant: Variant,
    /// Run one split only (both by default).
    #[arg(long, value_enum)]
    pub altpga_split: Option<SplitArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence of PGA-direction or projection-coefficient expansions.
    Converge {
        #[command(flatten)]
        common: Common,
        /// 1-based directions to track.
        #[arg(long, value_delimiter = ',')]
        directions: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "directions")]
        mode: ConvergeModeArg,
        /// Dimension of the subspace in projection mode.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Log-normal simulation on the sphere (estimate and initialization angles).
    SimulateSphere {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20.0)]
        variance_ratio: f64,
    },
    /// Alternative PGA on SO(n) with both splittings.
    Altpga {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        /// Standard deviations of generated tangent coordinates.
        #[arg(long, value_delimiter = ',')]
        std: Option<Vec<f64>>,
        /// Re-center the data after each step.
        #[arg(long)]
        recenter_steps: bool,
    },
    /// Resampling study of the linear-difference indicators.
    Indicators {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        subsample: usize,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long, value_delimiter = ',')]
        std: Option<Vec<f64>>,
    },
    /// Intrinsic mean of a dataset.
    Mean {
        #[command(flatten)]
        common: Common,
    },
    /// Exact PGA directions.
    Pga {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Also re-project from several starts and flag non-unique projections.
        #[arg(long)]
        check_ties: bool,
    },
    /// Projections onto the span of the first k PGA directions.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Second-order expansion of the PGA directions.
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Scale at which corrected directions are reported.
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
}
