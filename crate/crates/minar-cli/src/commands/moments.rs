//! `minar moments`: closed-form innovation and process moments for a
//! parameter file.

use std::path::PathBuf;

use clap::Args;

use minar::process::process_moments;

use crate::config::load_params;
use crate::error::CliResult;
use crate::table::{fmt4, Table};

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// JSON parameter file with keys {family, alpha, mu, sigma}
    #[arg(long)]
    pub params: PathBuf,
    /// Largest autocovariance lag to print
    #[arg(long, default_value_t = 3)]
    pub max_lag: usize,
}

fn matrix_block(title: &str, dim: usize, get: impl Fn(usize, usize) -> f64) -> String {
    let mut t = Table::new(vec![title.to_string()]);
    for i in 0..dim {
        let mut row = vec![String::new()];
        row.extend((0..dim).map(|j| fmt4(get(i, j))));
        t.push(row);
    }
    t.render()
}

pub fn run(args: &MomentsArgs) -> CliResult<()> {
    let params = load_params(&args.params)?;
    let n = params.dim();
    let innov = params.innovations().moments();
    let proc = process_moments(&params);

    let mut head = Table::new(vec![String::new(), String::new()]);
    let join4 = |xs: &[f64]| xs.iter().map(|&v| fmt4(v)).collect::<Vec<_>>().join("  ");
    head.push(vec!["family".into(), params.innovations().family().to_string()]);
    head.push(vec!["alpha".into(), join4(params.alpha())]);
    head.push(vec!["innovation mean".into(), join4(&innov.mean)]);
    head.push(vec!["process mean".into(), join4(&proc.mean)]);
    print!("{}", head.render());

    print!("{}", matrix_block("innovation covariance", n, |i, j| innov.cov.get(i, j)));
    print!(
        "{}",
        matrix_block("innovation correlation", n, |i, j| {
            innov.cov.get(i, j) / (innov.cov.get(i, i) * innov.cov.get(j, j)).sqrt()
        })
    );
    print!("{}", matrix_block("process covariance", n, |i, j| proc.cov.get(i, j)));
    for h in 1..=args.max_lag {
        let g = proc.autocov(h);
        print!("{}", matrix_block(&format!("autocovariance lag {h}"), n, |i, j| g.get(i, j)));
    }
    Ok(())
}
