//! `homscope` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "homscope",
    version,
    about = "Exact homomorphism counts, F-WL features and generalization bounds"
)]
pub struct Cli {
    /// TOML file whose keys fill in flags not given on the command line.
    /// Top-level keys and a table named after the subcommand are used.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Print human-readable tables to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count maps from a pattern into a host graph.
    Hom(HomArgs),
    /// List the homomorphic images of a pattern with inversion coefficients.
    Spasm(PatternArgs),
    /// Homomorphism matrix of a pattern set, its rank and redundant patterns.
    Matrix(MatrixArgs),
    /// F-WL colour-histogram features of a dataset.
    Featurize(FeaturizeArgs),
    /// Data-dependent generalization bound report.
    Bound(BoundArgs),
    /// Shearer entropy coefficient of a pattern relative to the edge.
    Shearer(PatternArgs),
    /// Convert a TU dataset directory to the JSON interchange format.
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountMode {
    Hom,
    Inj,
    Surj,
    Aut,
    Sub,
}

#[derive(Args, Debug)]
pub struct HomArgs {
    /// Edge-list file or pattern name (K3, C4, P3, PAW, V, ...).
    #[arg(long)]
    pub pattern: String,
    /// Edge-list file or pattern name; not needed for `--mode aut`.
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long, value_enum, default_value = "hom")]
    pub mode: CountMode,
    /// Search-node budget.
    #[arg(long, default_value_t = homscope::hom::DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct PatternArgs {
    /// Edge-list file or pattern name.
    #[arg(long)]
    pub pattern: String,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "source")]
pub struct MatrixSource {
    /// Comma-separated pattern names or edge-list files.
    #[arg(long)]
    pub patterns: Option<String>,
    /// CSV file holding a square integer matrix.
    #[arg(long, value_name = "CSV")]
    pub literal: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub source: MatrixSource,
    /// Also write the matrix as CSV to this path.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Graph,
    Node,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FeatureFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    /// Training graphs only (all graphs when the dataset has no split).
    Train,
    All,
}

#[derive(Args, Debug)]
pub struct DatasetArgs {
    /// TU dataset directory or JSON interchange file.
    #[arg(long)]
    pub dataset: PathBuf,
    /// TU dataset name; defaults to the directory name.
    #[arg(long)]
    pub name: Option<String>,
    /// Comma-separated pattern names or edge-list files.
    #[arg(long, default_value = "V")]
    pub patterns: String,
    /// Refinement depth L.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
}

#[derive(Args, Debug)]
pub struct FeaturizeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, value_enum, default_value = "graph")]
    pub level: LevelArg,
    /// Node level: refine each node's depth-hop ego-graph.
    #[arg(long)]
    pub ego: bool,
    #[arg(long, value_enum, default_value = "all")]
    pub split: SplitArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FeatureFormat,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KlArg {
    /// k-nearest-neighbour estimator.
    Knn,
    /// Exact KL between empirical measures.
    Exact,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, value_enum, default_value = "graph")]
    pub task: LevelArg,
    /// Number of subsample pairs n per class.
    #[arg(long, default_value_t = 1)]
    pub n_pairs: usize,
    #[arg(long, default_value_t = homscope::bounds::DEFAULT_DELTA)]
    pub delta: f64,
    /// L_c/γ: one value, or one per class separated by commas.
    /// Defaults to 3 for graph tasks and 6 for node tasks.
    #[arg(long)]
    pub lip_over_gamma: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report the resampled expectation bound over this many repeats.
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long, value_enum, default_value = "knn")]
    pub kl: KlArg,
    /// Neighbour order of the k-NN estimator.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Node task: features from ego-graphs instead of whole graphs.
    #[arg(long)]
    pub ego: bool,
    /// Fail when a class is too small for pair sampling.
    #[arg(long)]
    pub strict: bool,
    /// Append a one-row CSV summary to this file.
    #[arg(long, value_name = "PATH")]
    pub summary_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// TU dataset directory.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub name: Option<String>,
    /// Output JSON file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("HOMSCOPE_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            CliError::Usage(format!(
                "HOMSCOPE_THREADS must be a positive integer, got '{v}'"
            ))
        })?;
        if n == 0 {
            return Err(CliError::Usage(
                "HOMSCOPE_THREADS must be at least 1".into(),
            ));
        }
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let argv = config::apply_config(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    configure_threads()?;
    commands::dispatch(cli)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
