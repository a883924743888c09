//! `multijames`: multi-opponent win probabilities from the command line.
//!
//! Exit codes: 0 ok, 1 failed checks, 2 undefined contest, 3 graph error,
//! 4 parse or input error.

mod commands;
mod error;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, EXIT_PARSE};

#[derive(Debug, Parser)]
#[command(
    name = "multijames",
    version,
    about = "Win probabilities for one competitor against several opponents"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Agreement tolerance (default 1e-9; 1e-3 for grid families in `verify`).
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability that the protagonist beats every opponent.
    Predict(PredictArgs),
    /// Estimate the probability by replaying the draw process.
    Simulate(SimulateArgs),
    /// Root's win probability from pairwise probabilities on a tree.
    InferTree(InferTreeArgs),
    /// Every competitor's percentage from one known percentage and a tree.
    Propagate(PropagateArgs),
    /// Pairwise records and percentages from finishing orders.
    Ingest(IngestArgs),
    /// Check a candidate family against the structural properties.
    Verify(VerifyArgs),
    /// Write a grid-family file by tabulating a family.
    Tabulate(TabulateArgs),
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Protagonist's winning percentage, or name with --events.
    #[arg(short = 'a', long = "protagonist", allow_hyphen_values = true)]
    pub protagonist: String,
    /// Comma-separated opponent percentages, or names with --events.
    #[arg(
        short = 'b',
        long = "opponents",
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub opponents: Vec<String>,
    #[arg(long, default_value = "direct")]
    pub method: String,
    /// Evaluate every method and report the largest disagreement.
    #[arg(long, conflicts_with = "method")]
    pub all_methods: bool,
    /// Pivot percentage for the substitution method.
    #[arg(long)]
    pub pivot: Option<f64>,
    /// Opponent blocks for the partition method, 1-based, e.g. `1,2;3`.
    #[arg(long)]
    pub partition: Option<String>,
    /// Look up percentages by name in an events CSV.
    #[arg(long)]
    pub events: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Ties::Reject)]
    pub ties: Ties,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(short = 'a', long = "protagonist")]
    pub protagonist: f64,
    #[arg(
        short = 'b',
        long = "opponents",
        value_delimiter = ',',
        required = true
    )]
    pub opponents: Vec<f64>,
    /// Number of simulated contests.
    #[arg(short = 'n', long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Rounds after which a contest without a winner is abandoned.
    #[arg(long, default_value_t = multijames::sim::DEFAULT_MAX_ROUNDS)]
    pub max_rounds: u64,
}

#[derive(Debug, Args)]
pub struct InferTreeArgs {
    /// Edges JSON file.
    pub edges: PathBuf,
    /// Competitor whose win probability is wanted (defaults to the file's root).
    #[arg(long)]
    pub root: Option<String>,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    /// Edges JSON file.
    pub edges: PathBuf,
    /// Known percentage, as NAME=PCT.
    #[arg(long)]
    pub anchor: String,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Events CSV file with columns event_id,competitor,rank.
    pub events: PathBuf,
    #[arg(long, value_enum, default_value_t = Ties::Reject)]
    pub ties: Ties,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ties {
    /// Shared ranks are an error.
    Reject,
    /// Tied competitors get half a win each.
    Half,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `builtin`, `grid:PATH`, or `counterexample:NAME`.
    #[arg(long, default_value = "builtin")]
    pub family: String,
    /// Sampled contests per opponent count.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    /// `builtin` or `counterexample:NAME`.
    #[arg(long, default_value = "builtin")]
    pub family: String,
    /// Opponent counts to tabulate.
    #[arg(short = 'n', long = "n", value_delimiter = ',', default_values_t = [1usize, 2])]
    pub sizes: Vec<usize>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.render(cli.global.output));
            ExitCode::from(outcome.exit)
        }
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
