use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "modecluster",
    version,
    about = "K-modes, K-means and Gaussian mean-shift clustering"
)]
pub struct Cli {
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true, env = "MODECLUSTER_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset and its generating labels.
    Generate(GenerateArgs),
    /// Cluster a CSV dataset and print a JSON run report.
    Cluster(ClusterArgs),
    /// Compare two label files (ARI and NMI).
    Evaluate(EvaluateArgs),
    /// Print the average k-th nearest neighbour distance.
    Bandwidth(BandwidthArgs),
    /// Count mean-shift modes over a geometric bandwidth grid.
    GmsScan(GmsScanArgs),
    /// Regenerate one of the toy experiments into a directory.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    GaussianBlobs,
    TwoMoons,
    DegreeMixture,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub kind: DatasetKind,
    /// Points per blob / per moon.
    #[arg(long)]
    pub n: Option<usize>,
    /// Blob stddev or moon noise.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n_gauss: Option<usize>,
    #[arg(long)]
    pub n_power: Option<usize>,
    #[arg(long)]
    pub power_exponent: Option<f64>,
    #[arg(long)]
    pub power_xmin: Option<f64>,
    #[arg(long)]
    pub power_xmax: Option<f64>,
    /// Data CSV to write.
    #[arg(long, short, default_value = "data.csv")]
    pub out: PathBuf,
    /// Labels CSV to write (default: <out stem>.labels.csv).
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Kmeans,
    Kmodes,
    Gms,
}

impl Algo {
    pub fn id(self) -> &'static str {
        match self {
            Algo::Kmeans => "kmeans",
            Algo::Kmodes => "kmodes",
            Algo::Gms => "gms",
        }
    }
}

/// A bandwidth given as a number or `auto` (10-NN average distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaArg {
    Auto,
    Value(f64),
}

impl FromStr for SigmaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SigmaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(SigmaArg::Value(v)),
            Ok(v) => Err(format!("bandwidth must be finite and > 0, got {v}")),
            Err(_) => Err(format!("expected a number or `auto`, got `{s}`")),
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Input CSV (one point per row).
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// The first line of the CSV is a header.
    #[arg(long)]
    pub header: bool,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Lloyd iteration cap per restart.
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// First homotopy bandwidth (default: bounding-box diagonal).
    #[arg(long)]
    pub sigma_start: Option<f64>,
    /// Final bandwidth, or `auto`.
    #[arg(long, default_value = "auto")]
    pub sigma_target: SigmaArg,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Fixed-σ iterations per schedule value.
    #[arg(long, default_value_t = 2)]
    pub j_iters: usize,
    /// Mean-shift iteration cap per mode step.
    #[arg(long, default_value_t = 100)]
    pub i_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub ms_tol: f64,
    /// Run fixed-σ K-modes at the target bandwidth instead of the homotopy.
    #[arg(long)]
    pub fixed: bool,
    #[arg(long, default_value_t = 500)]
    pub max_outer: usize,
    /// Write per-σ centroid snapshots (sigma,cluster,dim_0..).
    #[arg(long)]
    pub emit_path: Option<PathBuf>,

    /// Mean-shift bandwidth.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Mean-shift iteration cap per point.
    #[arg(long, default_value_t = 1000)]
    pub ms_max_iters: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub merge_radius_factor: f64,

    /// Ground-truth labels; adds ARI/NMI to the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Labels CSV to write (default: <data stem>.<algo>.labels.csv).
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    #[arg(long)]
    pub centroids_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
}

#[derive(Debug, Args)]
pub struct BandwidthArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = 10)]
    pub knn: usize,
}

#[derive(Debug, Args)]
pub struct GmsScanArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long)]
    pub sigma_lo: f64,
    #[arg(long)]
    pub sigma_hi: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long)]
    pub target_k: usize,
    #[arg(long, default_value_t = 1000)]
    pub ms_max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub ms_tol: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub merge_radius_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    ThreeGaussians,
    TwoMoons,
    Degree,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::ThreeGaussians => "three-gaussians",
            Experiment::TwoMoons => "two-moons",
            Experiment::Degree => "degree",
        }
    }
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub experiment: Experiment,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory (default: reproduce-<experiment>).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
