use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mdlvol",
    version = crate::report::TOOL_VERSION,
    about = "Model log-volumes, channel capacity and double-descent experiments",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte-Carlo capacity of the Gaussian linear channel with its bounds.
    Capacity(CapacityArgs),
    /// Log-volume of power-constrained linear regression and regime bounds.
    RegressionVolume(RegressionArgs),
    /// Monte-Carlo log-volume of lattice models with sandwich bounds.
    LatticeVolume(LatticeArgs),
    /// Log-volume of the stochastic sigmoid perceptron.
    PerceptronVolume(PerceptronArgs),
    /// K-fold ridge risk curves over a dimension grid.
    DoubleDescent(DoubleDescentArgs),
    /// MDL score of Boolean lattice models of growing size.
    MdlCurve(MdlCurveArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file; flags given on the command line override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Root seed for all random streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write an SVG chart.
    #[arg(long)]
    pub svg: bool,
    /// Suppress progress messages on stderr.
    #[arg(long)]
    pub quiet: bool,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, env = "MDLVOL_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Parameter counts D (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Sample counts N (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Signal-to-noise ratios (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub snr: Vec<f64>,
    /// Monte-Carlo draws per cell.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RegressionArgs {
    /// Parameter counts D (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Sample counts N (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Power constraint P on the coefficients.
    #[arg(long)]
    pub power: Option<f64>,
    /// Noise variance σ².
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Monte-Carlo draws for the design-averaged volume.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Use the unregularized volume only; fails when D > N.
    #[arg(long)]
    pub no_regularize: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Lattices as `bool:n` or paths to JSON lattice specs (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub lattice: Vec<String>,
    /// Simplex draws per lattice.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PerceptronArgs {
    /// Input dimensions D (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Noise variance σ².
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Upper end of the weight-norm integral.
    #[arg(long)]
    pub w_max: Option<f64>,
    /// Points on the weight-norm grid (at least 8).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Standard normal draws shared across the grid.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Include the w^(D-1) polar factor in the integrand.
    #[arg(long)]
    pub radial_weight: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DoubleDescentArgs {
    /// Sample sizes (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Ridge constants (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Fitted dimensions, ascending (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub d_grid: Vec<usize>,
    /// Number of informative coefficients.
    #[arg(long)]
    pub d_true: Option<usize>,
    /// Variance of each true coefficient.
    #[arg(long)]
    pub beta_var: Option<f64>,
    /// Noise variance.
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Start from the full grid (n ∈ {300, 600, 900}, d up to 2500).
    #[arg(long, conflicts_with = "config")]
    pub full: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MdlCurveArgs {
    /// Boolean lattice orders n, each with 2^n atoms (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub orders: Vec<u32>,
    /// Sample sizes, one data case each (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub sample_sizes: Vec<f64>,
    /// Fixed negative log-likelihood added to every score.
    #[arg(long)]
    pub neg_log_lik: Option<f64>,
    /// Simplex draws per lattice volume.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}
