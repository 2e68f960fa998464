mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use reslab::LabError;

#[derive(Parser, Debug)]
#[command(name = "reslab", version, about = "Weighted resolvent norm laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Search tau0 and write certificate.json
    Certify(Args),
    /// Measure g_s over an h/eps grid and write sweep.csv, summary.json, plotdata.tsv
    Sweep(Args),
    /// Tabulate mollification error and derivative ratios
    Mollify(Args),
    /// Tabulate psi(lambda) or omega(t)
    Convert(Args),
}

#[derive(clap::Args, Debug, Clone)]
struct Args {
    /// JSON run config, or a manifest.json from an earlier run
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to all cores
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Math(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Math(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<LabError> for CliError {
    fn from(err: LabError) -> Self {
        match err {
            LabError::InvalidInput(_) | LabError::InvalidConfig(_) => CliError::Invalid(err.to_string()),
            LabError::Internal(_) => CliError::Internal(err.to_string()),
            _ => CliError::Math(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
