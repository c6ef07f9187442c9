//! `lts`: temporally consistent LiDAR semantic segmentation, as a pipeline
//! of subcommands over plain files. Set `LTS_LOG` (e.g. `debug`) to
//! control logging.
//!
//! Exit codes: 0 success, 1 internal failure, 2 user-input error.

mod commands;
mod error;
mod manifest;

use clap::{Parser, Subcommand};
use error::{CliError, CliResult};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lts",
    version,
    about = "Temporally consistent semantic segmentation of LiDAR scans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project scans onto five-channel range images (RIMG files)
    Project(commands::project::ProjectArgs),
    /// Fuse per-scan classifier scores into temporally consistent labels
    Filter(commands::filter::FilterArgs),
    /// Evaluate predictions against ground-truth labels (class-wise IoU)
    Eval(commands::eval::EvalArgs),
    /// Generate a synthetic dataset: scans, poses, labels and scores
    Simulate(commands::simulate::SimulateArgs),
    /// Derive layer shapes and parameter counts from a network spec
    Netspec(commands::netspec::NetspecArgs),
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Project(args) => commands::project::run(args),
        Command::Filter(args) => commands::filter::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Netspec(args) => commands::netspec::run(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LTS_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(err)) => {
            eprintln!("internal error: {err:#}");
            ExitCode::from(1)
        }
    }
}
