//! Experiment harness: reproducible sweeps with CSV and plot-data output.
//!
//! Each subcommand runs one experiment family end to end and writes, into
//! its output directory, a data CSV, a `fit.csv` where a power law is
//! fitted, whitespace-delimited plot data, and a `manifest.txt` recording
//! every parameter needed to rerun the experiment byte-identically.
//!
//! Exit status: 0 on success, 2 on usage errors (bad flags or parameter
//! values), 1 on runtime failures (I/O and the like).

mod experiments;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "switchdyn",
    version,
    about = "Telegraph-forcing simulation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed; per-grid-point seeds derive from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (default: $SWITCHDYN_OUT or ./out, plus the
    /// experiment name).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve_out_dir(&self, experiment: &str) -> PathBuf {
        match &self.out_dir {
            Some(dir) => dir.clone(),
            None => {
                let base = std::env::var_os("SWITCHDYN_OUT")
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("out"));
                base.join(experiment)
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and simulated amplitude bound for periodic forcing
    /// over a frequency grid.
    ConstantSweep(ConstantSweepArgs),
    /// Sign-change frequency and amplitude bound of the delayed-feedback
    /// oscillator over a grid of feedback parameters.
    DdeSweep(DdeSweepArgs),
    /// Amplitude bound against switching frequency for each random
    /// interval family.
    DistSweep(DistSweepArgs),
    /// Power-law slopes at controlled coefficients of variation.
    CvSweep(CvSweepArgs),
    /// Double-well escape experiment under lognormal telegraph forcing.
    Bistable(BistableArgs),
}

#[derive(Args)]
struct ConstantSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lowest frequency of the grid.
    #[arg(long, default_value_t = 10.0)]
    fmin: f64,
    /// Highest frequency of the grid.
    #[arg(long, default_value_t = 1000.0)]
    fmax: f64,
    /// Grid points, log-uniformly spaced.
    #[arg(long, default_value_t = 30)]
    points: usize,
    /// Switch events per simulated estimate.
    #[arg(long, default_value_t = 100_000)]
    events: usize,
}

#[derive(Args)]
struct DdeSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lowest feedback parameter.
    #[arg(long, default_value_t = 3.2)]
    beta_min: f64,
    /// Highest feedback parameter.
    #[arg(long, default_value_t = 196.0)]
    beta_max: f64,
    /// Grid points, log-uniformly spaced.
    #[arg(long, default_value_t = 24)]
    points: usize,
    /// Integration step; 1/step must be an integer.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Total integrated time per point.
    #[arg(long, default_value_t = 1e4)]
    horizon: f64,
    /// Time discarded before measuring statistics.
    #[arg(long, default_value_t = 1e3)]
    burn_in: f64,
    /// Constant initial function on [-1, 0].
    #[arg(long, default_value_t = 0.1)]
    phi: f64,
}

#[derive(Args)]
struct DistSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Interval family: exponential, gamma, beta, lognormal, or all.
    #[arg(long, default_value = "all")]
    family: String,
    /// Grid points per family.
    #[arg(long, default_value_t = 30)]
    points: usize,
    /// Switch events per grid point.
    #[arg(long, default_value_t = 1_000_000)]
    events: usize,
}

#[derive(Args)]
struct CvSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Interval family: gamma, beta, lognormal, or all.
    #[arg(long, default_value = "all")]
    family: String,
    /// Coefficients of variation, comma separated.
    #[arg(long, default_value = "0.01,2,4,6,8,10", value_delimiter = ',')]
    cvs: Vec<f64>,
    /// Lowest frequency of the grid.
    #[arg(long, default_value_t = 10.0)]
    fmin: f64,
    /// Highest frequency of the grid.
    #[arg(long, default_value_t = 1000.0)]
    fmax: f64,
    /// Frequency grid points, log-uniformly spaced.
    #[arg(long, default_value_t = 30)]
    points: usize,
    /// Switch events per grid point.
    #[arg(long, default_value_t = 1_000_000)]
    events: usize,
}

#[derive(Args)]
struct BistableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Run a single point at this lognormal location instead of a grid.
    #[arg(long, conflicts_with_all = ["mu_min", "mu_max", "points"])]
    mu: Option<f64>,
    /// Lowest lognormal location of the grid.
    #[arg(long, default_value_t = -6.0)]
    mu_min: f64,
    /// Highest lognormal location of the grid.
    #[arg(long, default_value_t = -0.5)]
    mu_max: f64,
    /// Grid points, uniformly spaced in mu.
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Simulated time per realization (also the survival-time cap).
    #[arg(long, default_value_t = 120.0)]
    horizon: f64,
    /// Nominal integration step.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Monte Carlo realizations per grid point.
    #[arg(long, default_value_t = 200)]
    realizations: usize,
    /// Occupancy histogram bins.
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ConstantSweep(args) => experiments::constant_sweep(&args),
        Command::DdeSweep(args) => experiments::dde_sweep(&args),
        Command::DistSweep(args) => experiments::dist_sweep(&args),
        Command::CvSweep(args) => experiments::cv_sweep(&args),
        Command::Bistable(args) => experiments::bistable(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Experiment failures, split by whose fault they are.
#[derive(Debug)]
enum CliError {
    /// Caller-supplied values were rejected.
    Usage(String),
    /// The experiment itself failed (I/O and similar).
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<switchdyn::Error> for CliError {
    fn from(err: switchdyn::Error) -> Self {
        if err.is_usage() {
            CliError::Usage(err.to_string())
        } else {
            CliError::Runtime(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}
