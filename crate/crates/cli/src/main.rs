//! `fgf`: keyword-combination search over a literature corpus and
//! construction of a graph-structured failure-mode dataset, one stage per
//! subcommand.

mod artifacts;
mod config;
mod failure;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fgf_core::optimizer::Algorithm;

use crate::config::Overrides;
use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "fgf",
    version,
    about = "Keyword search optimization and failure-mode graph dataset pipeline"
)]
struct Cli {
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true, default_value = "fgf.toml")]
    config: PathBuf,
    /// Pipeline seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel stages [default: available cores].
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load or download the corpus, deduplicate it and write a snapshot.
    Fetch,
    /// Search keyword combinations with the configured algorithms.
    Optimize {
        /// Algorithms to run (hncsa, csa, nsga2); the configured list by default.
        #[arg(long, value_delimiter = ',')]
        algo: Option<Vec<Algorithm>>,
    },
    /// Hypervolume and retrieval metrics of every run.
    Evaluate,
    /// Per-field embedding tables with the built-in backends.
    Embed {
        /// Also sweep the word-level dimension and report similarity spread.
        #[arg(long)]
        sweep: bool,
    },
    /// Reduce, weight and concatenate field embeddings into node features.
    Fuse,
    /// Assemble nodes, edges and splits into the graph dataset.
    BuildGraph,
    /// Field similarity, clustering and silhouette of the dataset.
    Validate,
    /// Collate every stage into one summary with reference values.
    Report,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::config("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::runtime(e.to_string()))?;
    }
    let loaded = config::load(
        &cli.config,
        Overrides {
            seed: cli.seed,
            out: cli.out,
        },
    )?;
    match cli.command {
        Command::Fetch => stages::fetch(&loaded),
        Command::Optimize { algo } => stages::optimize(&loaded, algo.as_deref()),
        Command::Evaluate => stages::evaluate(&loaded),
        Command::Embed { sweep } => stages::embed(&loaded, sweep),
        Command::Fuse => stages::fuse(&loaded),
        Command::BuildGraph => stages::build_graph(&loaded),
        Command::Validate => stages::validate(&loaded),
        Command::Report => stages::report(&loaded),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
