use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ssdo",
    version,
    about = "Minimize maximum link utilization without an LP solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate topology, path-set and demand files.
    Gen(GenArgs),
    /// Optimize split ratios for one instance.
    Solve(SolveArgs),
    /// Exhaustive grid search on a tiny instance.
    Oracle(OracleArgs),
    /// Failure and perturbation sweeps.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Add scaled temporal noise to a demand series.
    Perturb(PerturbArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("shape").required(true).args(["complete", "ring_deadlock", "graphml"]))]
pub struct GenArgs {
    /// Directed complete graph on N nodes.
    #[arg(long, value_name = "N")]
    pub complete: Option<usize>,
    /// Ring fixture with N nodes, its two-path sets, demands and start splits.
    #[arg(long, value_name = "N")]
    pub ring_deadlock: Option<usize>,
    /// Topology Zoo GraphML file.
    #[arg(long, value_name = "FILE")]
    pub graphml: Option<PathBuf>,
    /// Edge capacity: uniform for --complete, fallback for --graphml.
    #[arg(long, default_value_t = 1.0)]
    pub capacity: f64,
    /// GraphML edge attribute holding capacities.
    #[arg(long, default_value = "LinkSpeedRaw")]
    pub capacity_attr: String,
    /// Candidate paths per pair (Yen, hop count).
    #[arg(long, value_name = "K", conflicts_with = "all_paths")]
    pub paths_per_pair: Option<usize>,
    /// Use |V| - 1 candidate paths per pair.
    #[arg(long)]
    pub all_paths: bool,
    /// Built-in demand set; `manual:fig2` is the three-node example.
    #[arg(long, value_name = "SPEC", conflicts_with_all = ["gravity", "total_volume"])]
    pub demands: Option<String>,
    /// Gravity-model demands with this total volume.
    #[arg(long, value_name = "TOTAL")]
    pub gravity: Option<f64>,
    /// Alias of --gravity.
    #[arg(long, value_name = "TOTAL", conflicts_with = "gravity")]
    pub total_volume: Option<f64>,
    /// Log-normal noise on gravity demands (standard deviation of the log).
    #[arg(long, value_name = "SIGMA")]
    pub gravity_noise: Option<f64>,
    /// Also write a series of this many gravity snapshots.
    #[arg(long, value_name = "M")]
    pub snapshots: Option<usize>,
    /// Label of the series sampling interval.
    #[arg(long, default_value = "1s")]
    pub interval: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Auto,
    Dense,
    Path,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long, value_name = "FILE")]
    pub topology: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub paths: PathBuf,
    /// Dense demand CSV, one row per source.
    #[arg(long, value_name = "FILE")]
    pub demands: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = FormArg::Auto)]
    pub form: FormArg,
    /// Binary-search width.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Stop when an iteration lowers the MLU by at most this much.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon0: f64,
    #[arg(long, value_name = "SECONDS")]
    pub budget_seconds: Option<f64>,
    /// Visit every demanded pair each iteration (ablation).
    #[arg(long = "static")]
    pub static_traversal: bool,
    /// Greedy vertex instead of the balanced subproblem solution (ablation).
    #[arg(long)]
    pub greedy_subproblem: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Start from this split file instead of shortest paths.
    #[arg(long, value_name = "FILE")]
    pub hot_start: Option<PathBuf>,
    /// Race the hot start against a cold start and keep the better one.
    #[arg(long, requires = "hot_start")]
    pub dual_start: bool,
    #[arg(long, value_name = "FILE", default_value = "report.json")]
    pub report: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub split_out: Option<PathBuf>,
    /// Per-edge load and utilization CSV.
    #[arg(long, value_name = "FILE")]
    pub util_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Optimize only this pair (`SRC,DST`), others fixed.
    #[arg(long, value_name = "SRC,DST")]
    pub pair: Option<String>,
    /// Ratios of the fixed pairs for --pair; shortest paths by default.
    #[arg(long, value_name = "FILE", requires = "pair")]
    pub split: Option<PathBuf>,
    #[arg(long, value_name = "FILE", default_value = "oracle.json")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Random link failures, candidate paths recomputed per trial.
    Failures(FailureArgs),
    /// Demand perturbation at several noise scales.
    Perturb(PerturbSweepArgs),
}

#[derive(Debug, Args)]
pub struct FailureArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated failure counts.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub counts: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Paths per pair on damaged topologies; defaults to the largest set in --paths.
    #[arg(long, value_name = "K")]
    pub paths_per_pair: Option<usize>,
    /// Divide each MLU by the MLU without failures.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_name = "FILE", default_value = "failures.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerturbSweepArgs {
    #[arg(long, value_name = "FILE")]
    pub topology: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub paths: PathBuf,
    /// Demand series JSON.
    #[arg(long, value_name = "FILE")]
    pub series: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated variance scales.
    #[arg(long, value_delimiter = ',', default_value = "2,5,20")]
    pub scales: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Divide each MLU by the MLU of the unperturbed snapshot.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_name = "FILE", default_value = "perturb.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long, value_name = "FILE")]
    pub series: PathBuf,
    #[arg(long)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}
