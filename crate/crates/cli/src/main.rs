//! `datadepth`: depth computation, anomaly detection, explanations and
//! benchmark reproduction from the command line.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use datadepth::bench::{Placement, ScenarioTag, Split};
use datadepth::detect::{DEFAULT_ALPHA, DEFAULT_SIMPLEX_SAMPLES};
use datadepth::explain::DEFAULT_GROUP_SIMILARITY;
use datadepth::optimize::Strategy;
use datadepth::DepthNotion;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "datadepth", version, about = "Multivariate data depth for anomaly detection")]
struct Cli {
    /// Master seed; drawn at random and logged when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel scoring and repetitions.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Depth of query points with respect to a reference sample.
    Depth(DepthArgs),
    /// Train a detector and write the model document.
    Fit(FitArgs),
    /// Score points with a saved model.
    Score(ScoreArgs),
    /// Optimal directions, projection sequences and direction similarities.
    Explain(ExplainArgs),
    /// Draw a labeled sample from a benchmark scenario.
    Simulate(SimulateArgs),
    /// Repeated draws scored by one or more methods, summarized by the p metric.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    #[arg(long, default_value = "projection")]
    pub notion: DepthNotion,
    #[arg(long, default_value = "nelder_mead")]
    pub strategy: Strategy,
    /// Directions evaluated per point by the search.
    #[arg(long, default_value_t = 1000)]
    pub directions: usize,
    /// Nelder-Mead restarts (default: directions / (20 d), at least 1).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Draws for the Monte Carlo simplex estimators.
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_SAMPLES)]
    pub simplex_samples: usize,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, required_unless_present = "grid")]
    pub input: Option<PathBuf>,
    /// Evaluate on a square grid `LO,HI,STEPS` instead (two-dimensional data).
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyKind {
    Quantile,
    DetectAll,
    Fixed,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "quantile")]
    pub threshold_policy: PolicyKind,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Threshold for `--threshold-policy fixed`.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Share of the training rows kept as the reference sample.
    #[arg(long, default_value_t = 1.0)]
    pub fraction: f64,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving directions.csv, sequences.csv, similarity.csv and groups.csv.
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Rows whose projection sequences are written (default: flagged rows).
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<usize>>,
    #[arg(long, default_value_t = DEFAULT_GROUP_SIMILARITY)]
    pub group_threshold: f64,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: ScenarioTag,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Toeplitz correlation.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Toeplitz anomaly distance.
    #[arg(long)]
    pub shift: Option<f64>,
    #[arg(long)]
    pub placement: Option<Placement>,
    #[arg(long)]
    pub split: Option<Split>,
    /// Coordinate of the normal mean in robust_s51.
    #[arg(long)]
    pub normal_mean: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = "projection")]
    pub notion: Vec<DepthNotion>,
    #[arg(long, value_delimiter = ',', default_value = "nelder_mead")]
    pub strategy: Vec<Strategy>,
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub directions: Vec<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_SAMPLES)]
    pub simplex_samples: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub fraction: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    /// Summary file (per-rep rows and a quartile block); stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Depths of the first draw in increasing order, per method.
    #[arg(long)]
    pub ordered: Option<PathBuf>,
    /// Wall-clock milliseconds per repetition.
    #[arg(long)]
    pub timings: Option<PathBuf>,
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {w} workers: {e}")))?;
    }
    match &cli.command {
        Command::Depth(a) => commands::depth(a, resolve_seed(cli.seed)),
        Command::Fit(a) => commands::fit(a, resolve_seed(cli.seed)),
        Command::Score(a) => commands::score(a),
        Command::Explain(a) => commands::explain(a),
        Command::Simulate(a) => commands::simulate(a, resolve_seed(cli.seed)),
        Command::Bench(a) => commands::bench(a, resolve_seed(cli.seed)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
