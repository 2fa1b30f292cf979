//! `minar compare`: fit the two mixture models and the two independent
//! single-series baselines to one dataset and rank them by AIC.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use minar::baselines::{fit_baseline, BaselineFamily};
use minar::em::{fit, information_criteria, FitConfig};
use minar::mixtures::Family;
use minar::process::CountSeries;

use crate::csvio::load_csv;
use crate::error::{CliError, CliResult};
use crate::table::{fmt4, Table};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// CSV file: header row, one row of counts per time point
    #[arg(long)]
    pub data: PathBuf,
    /// Quadrature nodes per latent dimension (mixture models)
    #[arg(long, default_value_t = 15)]
    pub quad_nodes: usize,
    /// Relative log-likelihood change treated as converged
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// EM iteration cap
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Write the comparison rows as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One comparison row; failures keep their message instead of numbers.
#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub model: String,
    pub loglik: Option<f64>,
    pub n_params: Option<usize>,
    pub aic_standard: Option<f64>,
    pub aic_paper: Option<f64>,
    pub bic: Option<f64>,
    pub best: bool,
    pub error: Option<String>,
}

fn row_ok(model: &str, loglik: f64, k: usize, n_obs: usize) -> CompareRow {
    let c = information_criteria(loglik, k, n_obs);
    CompareRow {
        model: model.to_string(),
        loglik: Some(loglik),
        n_params: Some(k),
        aic_standard: Some(c.aic_standard),
        aic_paper: Some(c.aic_paper),
        bic: Some(c.bic),
        best: false,
        error: None,
    }
}

fn row_err(model: &str, message: String) -> CompareRow {
    CompareRow {
        model: model.to_string(),
        loglik: None,
        n_params: None,
        aic_standard: None,
        aic_paper: None,
        bic: None,
        best: false,
        error: Some(message),
    }
}

/// Fits all four models; per-model failures land in the row, not in Err.
pub fn comparison_rows(series: &CountSeries, config: &FitConfig) -> Vec<CompareRow> {
    let n_obs = series.len();
    let mut rows = Vec::new();
    for family in [BaselineFamily::Poisson, BaselineFamily::Geometric] {
        let name = family.to_string();
        rows.push(match fit_baseline(series, family) {
            Ok(b) => row_ok(&name, b.loglik, b.n_params, n_obs),
            Err(e) => row_err(&name, e.to_string()),
        });
    }
    for family in [Family::PoissonLognormal, Family::GeometricLogitnormal] {
        let name = format!("minar-{}", family.code());
        rows.push(match fit(series, family, config) {
            Ok(r) => row_ok(&name, r.loglik, r.params.n_params(), n_obs),
            Err(e) => row_err(&name, e.to_string()),
        });
    }
    if let Some(best) = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.aic_paper.map(|a| (i, a)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        rows[best.0].best = true;
    }
    rows
}

fn render(rows: &[CompareRow]) -> String {
    let mut t = Table::new(
        ["model", "log-like", "aic (-2L+k)", "aic (-2L+2k)", "bic", ""]
            .map(str::to_string)
            .to_vec(),
    );
    for r in rows {
        match r.loglik {
            Some(_) => t.push(vec![
                r.model.clone(),
                fmt4(r.loglik.unwrap()),
                fmt4(r.aic_paper.unwrap()),
                fmt4(r.aic_standard.unwrap()),
                fmt4(r.bic.unwrap()),
                if r.best { "*".into() } else { String::new() },
            ]),
            None => t.push(vec![
                r.model.clone(),
                format!("failed: {}", r.error.as_deref().unwrap_or("unknown")),
            ]),
        }
    }
    t.render()
}

pub fn run(args: &CompareArgs) -> CliResult<()> {
    let loaded = load_csv(&args.data)?;
    let config = FitConfig {
        quad_nodes: args.quad_nodes,
        tol: args.tol,
        max_iter: args.max_iter,
        init: None,
    };
    let rows = comparison_rows(&loaded.series, &config);
    print!("{}", render(&rows));
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&rows)
            .map_err(|e| CliError::input(format!("serializing table: {e}")))?;
        std::fs::write(path, json + "\n")
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
