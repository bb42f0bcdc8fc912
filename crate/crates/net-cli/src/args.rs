use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use net_core::data::LabelColumn;

#[derive(Parser, Debug)]
#[command(
    name = "net",
    version,
    about = "Kernelized domain-adaptation experiment runner"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the no-adaptation baseline and one fixed-parameter fit.
    Run(RunArgs),
    /// Select hyperparameters on a KMM-weighted source validation split,
    /// then refit on the full source.
    Gridsearch(GridsearchArgs),
    /// Emit a synthetic shifted-Gaussian dataset to delimited files.
    Synth(SynthArgs),
    /// Compute KMM instance weights and the validation split only.
    Kmm(KmmArgs),
}

/// Where the two domains come from: a pair of files or the synthetic
/// generator.
#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Labeled source table (delimited text, one header row).
    #[arg(long, requires = "target", conflicts_with = "synth")]
    pub source: Option<PathBuf>,

    /// Target table; the label column is optional and only scores accuracy.
    #[arg(long, requires = "source", conflicts_with = "synth")]
    pub target: Option<PathBuf>,

    /// Label column, by header name or 0-based index.
    #[arg(long)]
    pub labels: Option<LabelColumn>,

    /// Generate shifted Gaussians instead of reading files.
    #[arg(long)]
    pub synth: bool,

    #[arg(long, default_value_t = 300, help = "Synthetic source size")]
    pub n_s: usize,

    #[arg(long, default_value_t = 300, help = "Synthetic target size")]
    pub n_t: usize,

    #[arg(long, default_value_t = 2, help = "Synthetic class count")]
    pub classes: usize,

    #[arg(long, default_value_t = 2, help = "Synthetic feature dimension")]
    pub dim: usize,

    #[arg(long, default_value_t = 1.5, help = "Target mean shift, in class-stddev units")]
    pub shift: f64,

    #[arg(long, default_value_t = 0.0, help = "Target mean rotation, radians")]
    pub rotation: f64,

    /// Drop the synthetic target labels (accuracy fields become absent).
    #[arg(long)]
    pub strip_target_labels: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PreprocessArgs {
    /// Z-score features (statistics fit on the source by default).
    #[arg(long)]
    pub standardize: bool,

    /// Fit standardization statistics on source+target pooled.
    #[arg(long, requires = "standardize")]
    pub standardize_pooled: bool,

    /// Project onto this many pooled principal directions.
    #[arg(long)]
    pub pca: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelFamily {
    Linear,
    Rbf,
    Poly,
}

/// `median` or an explicit positive value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthArg {
    Median,
    Value(f64),
}

impl FromStr for BandwidthArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("median") {
            return Ok(BandwidthArg::Median);
        }
        s.parse::<f64>()
            .map(BandwidthArg::Value)
            .map_err(|_| format!("expected a number or 'median', got {s:?}"))
    }
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelFamily::Rbf)]
    pub kernel: KernelFamily,

    /// Rbf bandwidth: a positive number or `median`.
    #[arg(long, default_value = "median")]
    pub bandwidth: BandwidthArg,

    /// Polynomial degree.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,

    /// Polynomial offset.
    #[arg(long, default_value_t = 1.0)]
    pub offset: f64,
}

#[derive(Args, Debug, Clone)]
pub struct HyperArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,

    #[arg(long, default_value_t = 20)]
    pub k: usize,

    #[arg(long, default_value_t = 10)]
    pub iters: usize,
}

#[derive(Args, Debug, Clone)]
pub struct KmmFlags {
    /// Box bound on KMM weights.
    #[arg(long = "kmm-b", default_value_t = 1000.0)]
    pub kmm_b: f64,

    /// Sum-slack epsilon: a number or `auto` for (sqrt(n)-1)/sqrt(n).
    #[arg(long = "kmm-eps", default_value = "auto")]
    pub kmm_eps: EpsilonArg,

    /// Fraction of the source routed to validation.
    #[arg(long, default_value_t = 0.3)]
    pub val_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonArg {
    Auto,
    Value(f64),
}

impl FromStr for EpsilonArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(EpsilonArg::Auto);
        }
        s.parse::<f64>()
            .map(EpsilonArg::Value)
            .map_err(|_| format!("expected a number or 'auto', got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Full,
    Coordinate,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Projection sizes to search, comma separated.
    #[arg(long = "k-grid", value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,

    /// Candidate values for each of alpha, beta, gamma, comma separated.
    #[arg(long = "weight-grid", value_delimiter = ',')]
    pub weight_grid: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = SearchArg::Coordinate)]
    pub search: SearchArg,

    /// Refinement rounds per fit.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,

    /// Worker threads for configuration evaluation.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub preprocess: PreprocessArgs,

    #[command(flatten)]
    pub kernel: KernelArgs,

    #[command(flatten)]
    pub hyper: HyperArgs,

    /// Seed for the synthetic generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GridsearchArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub preprocess: PreprocessArgs,

    #[command(flatten)]
    pub kernel: KernelArgs,

    #[command(flatten)]
    pub grid: GridArgs,

    #[command(flatten)]
    pub kmm: KmmFlags,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 300)]
    pub n_s: usize,

    #[arg(long, default_value_t = 300)]
    pub n_t: usize,

    #[arg(long, default_value_t = 2)]
    pub classes: usize,

    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    #[arg(long, default_value_t = 1.5)]
    pub shift: f64,

    #[arg(long, default_value_t = 0.0)]
    pub rotation: f64,

    /// Where to write the source table.
    #[arg(long)]
    pub out_source: PathBuf,

    /// Where to write the target table.
    #[arg(long)]
    pub out_target: PathBuf,

    /// Omit the label column from the target file.
    #[arg(long)]
    pub strip_target_labels: bool,
}

#[derive(Args, Debug)]
pub struct KmmArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub preprocess: PreprocessArgs,

    #[command(flatten)]
    pub kernel: KernelArgs,

    #[command(flatten)]
    pub kmm: KmmFlags,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
