use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use combo_core::ObjectiveKind;

#[derive(Debug, Parser)]
#[command(
    name = "combo",
    version,
    about = "Community detection with Combo, Louvain and friends"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find communities in a graph.
    Detect(DetectArgs),
    /// Compare two partition files with NMI.
    Compare(CompareArgs),
    /// Generate a planted-partition graph with ground truth.
    Gen(GenArgs),
    /// Run a benchmark manifest.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    Modularity,
    Codelength,
}

impl From<Objective> for ObjectiveKind {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Modularity => ObjectiveKind::Modularity,
            Objective::Codelength => ObjectiveKind::CodeLength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Combo,
    Louvain,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Edge list (`u v [w]` per line) or Pajek `.net` file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "modularity")]
    pub objective: Objective,
    #[arg(long, value_enum, default_value = "combo")]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub max_communities: Option<usize>,
    /// Random starting splits per community pair.
    #[arg(long)]
    pub tries: Option<usize>,
    /// Minimum gain for Combo moves, or minimum level improvement for Louvain.
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Partition CSV to start Combo from.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Where to write the `node,community` CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Where to write the per-move CSV log (Combo only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Stop Combo after this many seconds and keep the best partition so far.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Evaluate community pairs on a single thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Graph to score both partitions on.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "modularity")]
    pub objective: Objective,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 16.0)]
    pub avg_degree: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; writes PREFIX.edges, PREFIX.truth.csv and PREFIX.meta.json.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub manifest: PathBuf,
    /// Directory for records.csv, summary.json, runtime.csv and partitions.
    #[arg(long, default_value = "bench-out")]
    pub out_dir: PathBuf,
    /// Overrides the manifest's job count.
    #[arg(long)]
    pub jobs: Option<usize>,
}
