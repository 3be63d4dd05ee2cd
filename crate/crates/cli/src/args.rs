use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gbs_tda::encoding::DEFAULT_TARGET_SPECTRAL;

#[derive(Debug, Parser)]
#[command(
    name = "gbstda",
    version,
    about = "Complex-weighted network analysis with simulated Gaussian boson sampling"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random dual-layer graph or a built-in fixture.
    Gen(GenArgs),
    /// Rescale and Takagi-factor a graph into squeezing parameters.
    Encode(EncodeArgs),
    /// Draw a batch of photon patterns.
    Sample(SampleArgs),
    /// Export the enumerated photon-number law.
    Distribution(DistributionArgs),
    /// Turn samples into cliques by greedy shrinking and local search.
    Cliques(CliquesArgs),
    /// Betti numbers of the density-filtered clique complex.
    Betti(BettiArgs),
    /// Euler characteristic surface over (omega_t, delta_t).
    Surface(SurfaceArgs),
    /// k-clique percolation clusters, optionally after damage.
    Percolation(PercolationArgs),
    /// Entropy versus percolation sweep over density thresholds.
    Entropy(EntropyArgs),
    /// GBS against uniform and squashed sampling on equal shot budgets.
    Compare(CompareArgs),
    /// Birth and death of k-cliques in the edge-magnitude filtration.
    Persistence(PersistenceArgs),
}

/// Flags accepted by every command; excluded from provenance.
#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key = value TOML file whose keys are long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    Planted,
    TwoCommunity,
    Chain,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendArg {
    Gbs,
    Uniform,
    Squashed,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Collapse,
    CollisionFree,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Edge probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub im_max: f64,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct EncodingParams {
    /// Largest singular value after rescaling.
    #[arg(long, default_value_t = DEFAULT_TARGET_SPECTRAL)]
    pub target_spectral: f64,
    /// Diagonal shift added before factorization.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub d: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EncodeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub encoding: EncodingParams,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct Cutoffs {
    #[arg(long, default_value_t = 8)]
    pub cutoff_total: u32,
    #[arg(long, default_value_t = 4)]
    pub cutoff_per_mode: u32,
    /// Maximum number of enumerated patterns.
    #[arg(long, default_value_t = gbs_tda::sampler::DEFAULT_PATTERN_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Graph to encode; alternative to --encoding.
    #[arg(long, conflicts_with = "encoding_file")]
    pub graph: Option<PathBuf>,
    #[arg(long = "encoding", id = "encoding_file")]
    pub encoding_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BackendArg::Gbs)]
    pub backend: BackendArg,
    #[arg(long)]
    pub shots: usize,
    #[arg(long)]
    pub seed: u64,
    /// Subset size for the uniform backend.
    #[arg(long)]
    pub k: Option<usize>,
    /// Transmission of the uniform loss channel.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Keep only shots with at least this many photons.
    #[arg(long, default_value_t = 0)]
    pub min_photons: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub cutoffs: Cutoffs,
    #[command(flatten)]
    #[serde(flatten)]
    pub encoding: EncodingParams,
}

#[derive(Debug, Args, Serialize)]
pub struct DistributionArgs {
    #[arg(long, conflicts_with = "encoding_file")]
    pub graph: Option<PathBuf>,
    #[arg(long = "encoding", id = "encoding_file")]
    pub encoding_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub cutoffs: Cutoffs,
    #[command(flatten)]
    #[serde(flatten)]
    pub encoding: EncodingParams,
}

#[derive(Debug, Args, Serialize)]
pub struct CliquesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = gbs_tda::cliques::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Bins of the density histogram.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BettiArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k_ref: usize,
    /// Density threshold on k_ref-cliques.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Keep only edges with magnitude at most this value.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Highest topological dimension reported.
    #[arg(long, default_value_t = 2)]
    pub dmax: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Ascending edge-magnitude thresholds, comma separated.
    #[arg(long, value_delimiter = ',', required = true, action = ArgAction::Set)]
    pub omega: Vec<f64>,
    /// Ascending density thresholds, comma separated.
    #[arg(long, value_delimiter = ',', required = true, action = ArgAction::Set)]
    pub delta: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub k_ref: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PercolationArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Remove every edge of the k-cliques containing this node first.
    #[arg(long)]
    pub damage_node: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Ascending density thresholds, comma separated.
    #[arg(long, value_delimiter = ',', required = true, action = ArgAction::Set)]
    pub thresholds: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub k_ref: usize,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2)]
    pub photons: u32,
    #[arg(long, value_enum, default_value_t = PolicyArg::Collapse)]
    pub policy: PolicyArg,
    /// Sample even when the exact conditional law fits the budget.
    #[arg(long)]
    pub sampled: bool,
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub damage_node: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub cutoffs: Cutoffs,
    #[command(flatten)]
    #[serde(flatten)]
    pub encoding: EncodingParams,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 3000)]
    pub shots: usize,
    /// GBS uses this seed, uniform seed + 1, squashed seed + 2.
    #[arg(long)]
    pub seed: u64,
    /// Photonic shots below this photon number count as undetected and are redrawn.
    #[arg(long, default_value_t = 1)]
    pub min_photons: u32,
    #[arg(long, default_value_t = gbs_tda::cliques::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Count only hits on this vertex set instead of any k-clique.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub target: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub cutoff_total: u32,
    #[arg(long, default_value_t = 4)]
    pub cutoff_per_mode: u32,
    #[arg(long, default_value_t = gbs_tda::sampler::DEFAULT_PATTERN_BUDGET)]
    pub budget: u128,
    #[command(flatten)]
    #[serde(flatten)]
    pub encoding: EncodingParams,
}

#[derive(Debug, Args, Serialize)]
pub struct PersistenceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}
