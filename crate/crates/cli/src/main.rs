//! `ncg`: command-line front end for the centrality network formation game.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 internal error,
//! 3 semantic negative (e.g. `classify` on a non-equilibrium), 4 verification
//! mismatch.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use centrality_game::Backend;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "ncg",
    version,
    about = "Centrality-maximization network formation game"
)]
pub struct Cli {
    /// Worker threads for batch simulation and enumeration [default: all cores].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Bonacich centrality of every node, and optionally hitting times to a target.
    Centrality(CentralityArgs),
    /// All optimal actions of one player.
    BestResponse(BestResponseArgs),
    /// Nash and strict-Nash test plus structural class; exit 3 if not Nash.
    Classify(ClassifyArgs),
    /// Seeded asynchronous best-response dynamics.
    Simulate(SimulateArgs),
    /// Brute-force every profile and list the Nash equilibria.
    EnumerateNe(OracleArgs),
    /// Check the equilibrium classification against brute force.
    VerifyTheorems(OracleArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// rational (exact) or float [default: rational for n <= 16].
    #[arg(long, value_parser = parse_backend)]
    pub backend: Option<Backend>,

    /// Discount β as p/q or decimal; overrides the value in an input file.
    #[arg(long)]
    pub beta: Option<String>,

    /// Write the result to this file (with a .manifest.json beside it).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GameArgs {
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long)]
    pub m: Option<usize>,

    /// "uniform" or comma-separated weights (p/q or decimal) summing to 1.
    #[arg(long)]
    pub eta: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct CentralityArgs {
    /// Configuration document (JSON).
    #[arg(long, short)]
    pub input: PathBuf,

    /// Also report hitting times to this node (1-based).
    #[arg(long)]
    pub target: Option<usize>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    /// Also write the graph in DOT format.
    #[arg(long)]
    pub dot: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct BestResponseArgs {
    #[arg(long, short)]
    pub input: PathBuf,

    /// Player (1-based).
    #[arg(long)]
    pub player: usize,

    #[arg(long)]
    pub dot: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long, short)]
    pub input: PathBuf,

    #[arg(long)]
    pub dot: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,

    /// First seed; runs use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub seeds_count: u64,

    #[arg(long, default_value_t = centrality_game::dynamics::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,

    /// Steps to keep running after absorption, checking the class holds.
    #[arg(long, default_value_t = 0)]
    pub audit_steps: usize,

    /// "random" or a configuration document to start every run from.
    #[arg(long, default_value = "random")]
    pub init: String,

    /// Directory for per-seed trajectory CSV, summary JSON and DOT files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Write a DOT snapshot every k steps (needs --out-dir).
    #[arg(long)]
    pub dot_every: Option<usize>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub game: GameArgs,

    /// Allow spaces above 100000 profiles (prints progress to stderr).
    #[arg(long)]
    pub large: bool,

    #[command(flatten)]
    pub common: Common,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse()
        .map_err(|_| format!("expected rational or float, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(error::EXIT_INTERNAL as u8);
        }
    }
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
