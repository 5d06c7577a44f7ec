//! `ruinlab`: ruin probabilities and running-utility values for an insurer
//! investing a fixed fraction of surplus in a risky asset.
//!
//! Exit codes: 0 success, 2 configuration or precondition error, 3
//! numerical failure. Payloads (CSV or report) go to stdout or `--out`;
//! warnings go to stderr.

mod commands;
mod config;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "ruinlab", version, about = "Ruin and utility simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the optimal investment fraction and value profile constants
    Merton(CommonArgs),
    /// Estimate the ruin probability for one configuration
    Ruin(CommonArgs),
    /// Sweep ruin probabilities over distributions and surplus levels
    Table(CommonArgs),
    /// Estimate expected accumulated utility, optionally beside the closed form
    Value(CommonArgs),
    /// Check the restart consistency of the value estimator
    Dpp(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the run configuration file
    #[arg(long)]
    config: PathBuf,
    /// Write the payload to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the [sim] master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of worker threads; never affects the output bytes
    #[arg(long)]
    workers: Option<usize>,
    /// Print the canonical configuration and exit without running
    #[arg(long)]
    echo_config: bool,
}

/// Anything that stops a command, tagged with its exit code.
pub enum Failure {
    Config(ConfigError),
    Core(ruinlab_core::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Core(ruinlab_core::Error::Numerical(_)) => 3,
            Failure::Core(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(err) => err.fmt(f),
            Failure::Core(err) => err.fmt(f),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(err: ConfigError) -> Self {
        Failure::Config(err)
    }
}

impl From<ruinlab_core::Error> for Failure {
    fn from(err: ruinlab_core::Error) -> Self {
        Failure::Core(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&RunConfig) -> Result<String, Failure>) =
        match &cli.command {
            Command::Merton(args) => (args, commands::merton),
            Command::Ruin(args) => (args, commands::ruin),
            Command::Table(args) => (args, commands::table),
            Command::Value(args) => (args, commands::value),
            Command::Dpp(args) => (args, commands::dpp),
        };
    match execute(args, run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn execute(args: &CommonArgs, run: fn(&RunConfig) -> Result<String, Failure>) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.config).map_err(|err| {
        ConfigError(format!("cannot read {}: {err}", args.config.display()))
    })?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.sim.master_seed = seed;
    }
    if args.echo_config {
        return write_payload(&args.out, &cfg.canonical());
    }
    if let Some(workers) = args.workers {
        if workers == 0 {
            return Err(ConfigError("--workers must be at least 1".to_string()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|err| ConfigError(format!("cannot size the worker pool: {err}")))?;
    }
    if let Some(warning) = cfg.market.warning() {
        eprintln!("warning: {warning}");
    }
    let payload = run(&cfg)?;
    write_payload(&args.out, &payload)
}

fn write_payload(out: &Option<PathBuf>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, payload).map_err(|err| {
            ConfigError(format!("cannot write {}: {err}", path.display())).into()
        }),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}
