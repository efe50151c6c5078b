//! `bdqw` command-line front end.
//!
//! Every subcommand reads a JSON [`config::ExperimentConfig`] and writes CSV
//! or JSON to stdout or `--output`. Exit codes: 0 success, 1 verification
//! failure or I/O error, 2 config/validation error, 3 oracle cap exceeded.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::Format;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "bdqw", version, about = "Quantum walks on multi-dimensional birth-death chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position law of the walk at each requested time.
    Simulate(CommonArgs),
    /// Factorized-vs-dense agreement, orthogonality, unitarity and balance checks.
    Verify(CommonArgs),
    /// Kolmogorov distance of the standardized iid sum to N(0, 1) over `d_sweep`.
    Clt(CommonArgs),
    /// Wall-clock timing of dense vs factorized evaluation over `d_sweep`.
    Bench(CommonArgs),
    /// Eigenvalues, eigenvectors, weights and polynomial tables per dimension.
    DumpSpectrum(CommonArgs),
    /// The config in normalized form (explicit tables and probabilities).
    DumpConfig(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,

    /// Also compute the dense joint law on the full product space (simulate).
    #[arg(long)]
    pub dense: bool,

    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Largest product space allowed for dense computations.
    #[arg(long, env = "BDQW_ORACLE_CAP")]
    pub oracle_cap: Option<usize>,

    /// Comma-separated times, overriding the config.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub time: Option<Vec<f64>>,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::Verify(a)
            | Command::Clt(a)
            | Command::Bench(a)
            | Command::DumpSpectrum(a)
            | Command::DumpConfig(a) => a,
        }
    }
}

/// Runs a parsed command and writes its output.
pub fn run(cli: &Cli) -> CliResult<()> {
    let args = cli.command.args();
    let exp = commands::Experiment::load(args)?;
    let (body, status) = match &cli.command {
        Command::Simulate(_) => (commands::simulate(&exp)?, Ok(())),
        Command::Verify(_) => commands::verify(&exp)?,
        Command::Clt(_) => (commands::clt(&exp)?, Ok(())),
        Command::Bench(_) => (commands::bench(&exp)?, Ok(())),
        Command::DumpSpectrum(_) => (commands::dump_spectrum(&exp)?, Ok(())),
        Command::DumpConfig(_) => (commands::dump_config(&exp)?, Ok(())),
    };
    output::emit(&body, exp.output.as_deref())?;
    status
}
