//! `ggmgen` command-line front end.
//!
//! Exit codes: 0 success, 1 `check-chordal` on a non-chordal graph, 2
//! parameter/parse/I/O errors, 3 `uniform` on a non-chordal graph, 4 sampler
//! degeneracy exhaustion.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ggmgen::Error;

#[derive(Debug, Parser)]
#[command(name = "ggmgen", version, about = "Random covariance and correlation matrices with a graph-prescribed zero pattern")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an Erdős–Rényi graph.
    GraphGen {
        #[arg(long)]
        p: usize,
        /// Edge probability.
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangulate a graph and report the number of fill edges.
    Triangulate {
        graph: PathBuf,
        /// Output file for the triangulated graph.
        #[arg(long)]
        out: PathBuf,
        /// Output file for the perfect ordering (1-based vertex labels).
        #[arg(long)]
        order_out: Option<PathBuf>,
    },
    /// Print `chordal` (exit 0) or `not-chordal` (exit 1).
    CheckChordal { graph: PathBuf },
    /// Sample a batch of matrices.
    Sample(SampleArgs),
    /// Per-entry values and histograms of a batch written by `sample`.
    Stats {
        /// Stacked matrix file or directory of matrix CSV files.
        input: PathBuf,
        /// Restrict to the edges of this graph; all upper-triangular
        /// positions otherwise.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce one of the standard experiments.
    Experiment {
        #[arg(value_enum)]
        name: Experiment,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["graph", "er"])))]
struct SampleArgs {
    /// Graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Erdős–Rényi graph on P vertices with edge probability D, seeded from `--seed`.
    #[arg(long, num_args = 2, value_names = ["P", "D"])]
    er: Option<Vec<String>>,
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    sigma_eps: Option<f64>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Rescale diagonal-dominance output to a correlation matrix.
    #[arg(long)]
    correlation: bool,
    /// Write all matrices to one file separated by blank lines.
    #[arg(long)]
    stacked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Elliptope3,
    Margdens,
    MargdensChordal,
    Chain50,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotChordal => 3,
        Error::SamplerExhausted { .. } | Error::DegenerateRow { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GraphGen { p, d, seed, out } => commands::graph_gen(p, d, seed, out.as_deref()),
        Command::Triangulate { graph, out, order_out } => commands::triangulate(&graph, &out, order_out.as_deref()),
        Command::CheckChordal { graph } => commands::check_chordal(&graph),
        Command::Sample(args) => commands::sample(&args),
        Command::Stats { input, graph, out } => commands::stats(&input, graph.as_deref(), &out),
        Command::Experiment { name, n, seed, out } => commands::experiment(name, n, seed, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
