//! Batch front end for the count time-series toolkit: simulation, EM
//! fitting, closed-form moment reports, likelihood-based model comparison,
//! and a simulate-then-refit bias study harness.
//!
//! Exit codes: `0` success, `1` model or numerical failure, `2` I/O,
//! configuration, or usage failure.

mod commands;
mod config;
mod csvio;
mod error;
mod table;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "minar",
    version,
    about = "Multivariate count time-series modelling with latent-Gaussian mixture innovations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a stationary path from a parameter file
    Simulate(commands::simulate::SimulateArgs),
    /// Fit a model to a CSV series by EM
    Fit(commands::fit::FitArgs),
    /// Print closed-form innovation and process moments
    Moments(commands::moments::MomentsArgs),
    /// Fit mixture models and independent baselines, ranked by AIC
    Compare(commands::compare::CompareArgs),
    /// Replicated simulate-then-refit bias/SD study over preset scenarios
    Study(commands::study::StudyArgs),
}

/// `MINAR_THREADS` caps the worker pool; unset means all available cores.
fn init_thread_pool() -> CliResult<()> {
    match std::env::var("MINAR_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    CliError::input(format!(
                        "MINAR_THREADS: expected a positive integer, got {raw:?}"
                    ))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::input(format!("MINAR_THREADS: {e}")))
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Fit(args) => commands::fit::run(&args),
        Command::Moments(args) => commands::moments::run(&args),
        Command::Compare(args) => commands::compare::run(&args),
        Command::Study(args) => commands::study::run(&args),
    }
}

fn main() {
    let cli = Cli::parse();
    let result = init_thread_pool().and_then(|()| dispatch(cli));
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
