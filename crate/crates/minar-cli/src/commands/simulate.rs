//! `minar simulate`: draw a stationary path and write it as CSV.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use minar::process::{simulate, DEFAULT_BURN_IN};

use crate::config::load_params;
use crate::csvio::{default_names, write_csv};
use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON parameter file with keys {family, alpha, mu, sigma}
    #[arg(long)]
    pub params: PathBuf,
    /// Number of time points to emit
    #[arg(long)]
    pub length: usize,
    /// Warm-up steps discarded before recording
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// RNG seed; identical seeds give byte-identical output
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    if args.length == 0 {
        return Err(CliError::input("length: must be at least 1"));
    }
    let params = load_params(&args.params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let series = simulate(&params, args.length, args.burn_in, &mut rng)?;
    let names = default_names(series.dim());

    let mut buf = Vec::new();
    write_csv(&mut buf, &names, &series)
        .map_err(|e| CliError::input(format!("serializing output: {e}")))?;
    match &args.out {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| CliError::input(format!("stdout: {e}"))),
    }
}
