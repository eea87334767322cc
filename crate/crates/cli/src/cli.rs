//! Command-line syntax.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use entrate::direct::DEFAULT_LIMIT_STEPS;
use entrate::estimator::Estimator;
use entrate::sim::BenchmarkKind;

use crate::ingest::Format;

#[derive(Debug, Parser)]
#[command(name = "entrate", version, about = "Entropy-rate estimation for discrete symbol sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the entropy rate of observed sequences.
    Estimate(EstimateArgs),
    /// Estimate with stationary-bootstrap standard errors.
    Bootstrap(BootstrapArgs),
    /// Simulate a Markov chain and write it as a sequence file.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo experiment plan.
    Experiment(ExperimentArgs),
    /// Pooled-variance two-sample t statistic.
    Ttest(TtestArgs),
    /// Show the sliding-window Lempel-Ziv phrase decomposition.
    Parse(ParseArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Sequence files. Several files are concatenated in order.
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Merge runs of the same symbol before estimating.
    #[arg(long)]
    pub collapse_repeats: bool,
    /// File listing the symbols, in order.
    #[arg(long, value_name = "FILE")]
    pub alphabet: Option<PathBuf>,
    /// Drop the transitions between consecutive files.
    #[arg(long)]
    pub exclude_boundaries: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Plug-in transition matrix with empirical state frequencies.
    Empirical,
    /// Plug-in transition matrix with its leading left eigenvector.
    Eigen,
    /// Plug-in transition matrix with a Cesàro-averaged power.
    Limit,
    /// Sliding-window Lempel-Ziv.
    Swlz,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// Markov order(s) for the direct methods, e.g. `1,2`.
    #[arg(long, value_delimiter = ',', default_value = "1", value_name = "M")]
    pub order: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "empirical")]
    pub method: Vec<MethodArg>,
    /// Matrix powers averaged by the limit method.
    #[arg(long, default_value_t = DEFAULT_LIMIT_STEPS)]
    pub steps: usize,
    /// Report 0 bits with a warning when the eigen or limit estimate is
    /// reducible, instead of failing.
    #[arg(long, alias = "paper-zero-mode")]
    pub zero_on_reducible: bool,
}

impl EstimatorArgs {
    pub fn estimators(&self) -> Vec<Estimator> {
        let mut out = Vec::new();
        for method in &self.method {
            if *method == MethodArg::Swlz {
                if !out.contains(&Estimator::Swlz) {
                    out.push(Estimator::Swlz);
                }
                continue;
            }
            for &order in &self.order {
                let zero_on_reducible = self.zero_on_reducible;
                let e = match method {
                    MethodArg::Empirical => Estimator::Empirical { order },
                    MethodArg::Eigen => Estimator::Eigen { order, zero_on_reducible },
                    MethodArg::Limit => Estimator::Limit { order, steps: self.steps, zero_on_reducible },
                    MethodArg::Swlz => unreachable!(),
                };
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report here (`-` for standard output).
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Write a flat CSV report here (`-` for standard output).
    #[arg(long, value_name = "OUT")]
    pub csv: Option<PathBuf>,
}

impl OutputArgs {
    pub fn uses_stdout(&self) -> bool {
        [&self.json, &self.csv].iter().any(|p| p.as_deref().is_some_and(|p| p.as_os_str() == "-"))
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimators: EstimatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimators: EstimatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Bootstrap replicates per estimator.
    #[arg(long, default_value_t = 100, value_name = "B")]
    pub replicates: usize,
    /// Geometric block parameter. Defaults to Ĥ / log2 n for each estimator.
    #[arg(long, value_name = "REAL")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub seed: u64,
    /// Leave out failed replicates instead of counting them as 0 bits.
    #[arg(long)]
    pub drop_failed: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["benchmark", "matrix", "second_order"])))]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub benchmark: Option<BenchmarkArg>,
    /// JSON file holding the transition matrix as an array of rows.
    #[arg(long, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// Two-state second-order chain with parameters `a,b,c,d`.
    #[arg(long, value_delimiter = ',', num_args = 1, value_name = "A,B,C,D")]
    pub second_order: Option<Vec<f64>>,
    #[arg(long, default_value_t = 8)]
    pub kappa: usize,
    /// Self-transition probability of the low-entropy benchmark.
    #[arg(long, default_value_t = 0.95)]
    pub diag: f64,
    #[arg(long, short = 'n', value_name = "N")]
    pub length: usize,
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub seed: u64,
    /// Start from this state instead of a stationary draw.
    #[arg(long, value_name = "STATE")]
    pub init_state: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long, short = 'o', value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchmarkArg {
    Low,
    High,
    #[value(alias = "medium-builtin")]
    Medium,
}

impl From<BenchmarkArg> for BenchmarkKind {
    fn from(b: BenchmarkArg) -> Self {
        match b {
            BenchmarkArg::Low => BenchmarkKind::Low,
            BenchmarkArg::High => BenchmarkKind::High,
            BenchmarkArg::Medium => BenchmarkKind::Medium,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment plan.
    pub plan: PathBuf,
    /// Override the plan's seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Override the plan's number of simulated series.
    #[arg(long, value_name = "R")]
    pub replicates: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TtestArgs {
    /// First group, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub a: Vec<f64>,
    /// Second group, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub b: Vec<f64>,
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["file", "text"])))]
pub struct ParseArgs {
    pub file: Option<PathBuf>,
    /// Parse this string instead of a file.
    #[arg(long)]
    pub text: Option<String>,
    /// Token format (default: chars for --text, tokens for files).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub collapse_repeats: bool,
    #[arg(long, value_name = "FILE")]
    pub alphabet: Option<PathBuf>,
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
}
