use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "cigam", version, about = "Core-periphery hypergraph model toolkit")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Load, deduplicate and filter a hypergraph.
    Preprocess(PreprocessArgs),
    /// Fit the model by maximum likelihood.
    Fit(FitArgs),
    /// Sample a hypergraph from the model.
    Sample(SampleArgs),
    /// Evaluate the log-likelihood of a fitted model.
    Loglik(LoglikArgs),
    /// Solve for the core threshold and emit the threshold curve.
    CoreThreshold(CoreThresholdArgs),
    /// Choose the number of layers and their breakpoints.
    SelectLayers(SelectLayersArgs),
    /// Compare against the logistic and permutation baselines.
    Compare(CompareArgs),
    /// Replace every hyperedge by a clique.
    Project(ProjectArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Preprocess(_) => "preprocess",
            Command::Fit(_) => "fit",
            Command::Sample(_) => "sample",
            Command::Loglik(_) => "loglik",
            Command::CoreThreshold(_) => "core-threshold",
            Command::SelectLayers(_) => "select-layers",
            Command::Compare(_) => "compare",
            Command::Project(_) => "project",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Command::Fit(a) => a.opt.seed,
            Command::Sample(a) => a.seed,
            Command::CoreThreshold(a) => a.seed,
            Command::SelectLayers(a) => a.opt.seed,
            Command::Compare(a) => a.seed,
            _ => 0,
        }
    }

    pub fn out(&self) -> &PathBuf {
        match self {
            Command::Preprocess(a) => &a.out,
            Command::Fit(a) => &a.out,
            Command::Sample(a) => &a.out,
            Command::Loglik(a) => &a.out,
            Command::CoreThreshold(a) => &a.out,
            Command::SelectLayers(a) => &a.out,
            Command::Compare(a) => &a.out,
            Command::Project(a) => &a.out,
        }
    }
}

/// Hypergraph input: an edge list, or the two-file simplicial format.
#[derive(Debug, Args, Serialize)]
pub struct GraphInput {
    /// Edge-list file, one hyperedge per line.
    #[arg(long, required_unless_present = "nverts", conflicts_with_all = ["nverts", "simplices"])]
    pub edges: Option<PathBuf>,
    /// Edge orders, one per line (simplicial format).
    #[arg(long, requires = "simplices")]
    pub nverts: Option<PathBuf>,
    /// Flattened node labels (simplicial format).
    #[arg(long, requires = "nverts")]
    pub simplices: Option<PathBuf>,
    /// Reject hyperedges that repeat a node.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Comma-separated steps applied in order: dedup, lcc, degmin=D, kcore=D, project.
    #[arg(long, default_value = "dedup,lcc")]
    pub filters: String,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMode {
    Exogenous,
    Endogenous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizeMode {
    Raw,
    Log1pMinmax,
    Zscore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionArg {
    Aic,
    Bic,
    Lr,
}

/// Where ranks or features come from.
#[derive(Debug, Args, Serialize)]
pub struct RankInput {
    /// CSV `node,rank` with ranks in [0, 1].
    #[arg(long, conflicts_with = "features")]
    pub ranks_file: Option<PathBuf>,
    /// CSV `node,<f1>,...,<fd>`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Feature column used as exogenous rank (default: the only column).
    #[arg(long)]
    pub rank_column: Option<String>,
    /// Feature normalization (default: log1p-minmax exogenous, zscore endogenous).
    #[arg(long, value_enum)]
    pub normalize: Option<NormalizeMode>,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 100)]
    pub steps_per_epoch: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Prior on the density parameters: none, exponential:ALPHA or pareto:ALPHA.
    #[arg(long, default_value = "none")]
    pub c_prior: String,
    /// Gamma prior on lambda as SHAPE,RATE.
    #[arg(long)]
    pub lambda_prior: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, value_enum, default_value = "exogenous")]
    pub ranks: RankMode,
    #[command(flatten)]
    pub rank_input: RankInput,
    /// Edge orders as MIN,MAX or a single order (default: orders present).
    #[arg(long)]
    pub k: Option<String>,
    /// Breakpoints, e.g. 0.5,1, or `auto` for elbow plus grid search.
    #[arg(long = "H", default_value = "1")]
    pub breakpoints: String,
    /// Grid step for `--H auto`.
    #[arg(long, default_value_t = 0.5)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 6)]
    pub l_max: usize,
    #[arg(long, value_enum, default_value = "aic")]
    pub criterion: CriterionArg,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    /// Edge orders as a comma-separated contiguous list, e.g. 2,3.
    #[arg(long)]
    pub k: String,
    #[arg(long)]
    pub lambda: f64,
    /// Density parameter per layer.
    #[arg(long)]
    pub c: String,
    #[arg(long = "H", default_value = "1")]
    pub breakpoints: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LoglikArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Model JSON written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub rank_input: RankInput,
    #[arg(long)]
    pub k: Option<String>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CoreThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "cL")]
    pub c_l: f64,
    /// Points on the threshold curve.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Also sample this many graphs and record their empirical thresholds.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectLayersArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 6)]
    pub l_max: usize,
    /// Skip the breakpoint grid search.
    #[arg(long)]
    pub no_grid: bool,
    #[arg(long, default_value_t = 0.5)]
    pub grid_step: f64,
    #[arg(long, value_enum, default_value = "aic")]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value = "exogenous")]
    pub ranks: RankMode,
    #[command(flatten)]
    pub rank_input: RankInput,
    #[arg(long)]
    pub k: Option<String>,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Model JSON written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub rank_input: RankInput,
    #[arg(long)]
    pub k: Option<String>,
    /// Name reported in the comparison table.
    #[arg(long, default_value = "dataset")]
    pub dataset: String,
    /// Negative batch size as a fraction of the non-edges.
    #[arg(long, default_value_t = 0.2)]
    pub batch_fraction: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub lcp_step: f64,
    #[arg(long, default_value_t = 10)]
    pub lcp_epochs: usize,
    #[arg(long, default_value_t = 100)]
    pub lcp_steps_per_epoch: usize,
    /// Negatives per Logistic-CP training step (default: one per observed
    /// hyperedge, capped at the non-edge count).
    #[arg(long)]
    pub lcp_batch: Option<usize>,
    /// Hölder exponent of the permutation models.
    #[arg(long, default_value_t = 10.0)]
    pub a: f64,
    /// Reported with the permutation model; not used in scoring.
    #[arg(long, default_value_t = 20.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Output directory, created if missing.
    #[arg(long, default_value = "cigam-out")]
    pub out: PathBuf,
}
