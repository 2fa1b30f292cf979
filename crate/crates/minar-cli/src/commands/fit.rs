//! `minar fit`: EM estimation on a CSV series, with a JSON report.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use minar::em::{fit, information_criteria, FitConfig, FitReport, InformationCriteria};
use minar::mixtures::Family;
use minar::process::CountSeries;

use crate::commands::FamilyArg;
use crate::csvio::load_csv;
use crate::error::{CliError, CliResult};
use crate::table::{fmt4, Table};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV file: header row, one row of counts per time point
    #[arg(long)]
    pub data: PathBuf,
    /// Innovation family
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Quadrature nodes per latent dimension
    #[arg(long, default_value_t = 15)]
    pub quad_nodes: usize,
    /// Relative log-likelihood change treated as converged
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// EM iteration cap
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Accepted for interface symmetry; estimation itself is deterministic
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here (summary always prints to stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Serialized fit report; field names are part of the output contract.
#[derive(Debug, Serialize)]
pub struct FitDoc {
    pub family: String,
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub loglik: f64,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub aic_standard: f64,
    pub aic_paper: f64,
    pub bic: f64,
    pub meta: MetaDoc,
}

#[derive(Debug, Serialize)]
pub struct MetaDoc {
    pub data: String,
    pub columns: Vec<String>,
    pub n_obs: usize,
    pub n_components: usize,
    pub n_params: usize,
    pub quad_nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
}

pub fn fit_doc(
    report: &FitReport,
    criteria: &InformationCriteria,
    data: String,
    columns: Vec<String>,
    n_obs: usize,
    config: &FitConfig,
) -> FitDoc {
    FitDoc {
        family: report.params.innovations().family().code().to_string(),
        alpha: report.params.alpha().to_vec(),
        mu: report.params.innovations().mu().to_vec(),
        sigma: report.params.innovations().sigma().to_rows(),
        loglik: report.loglik,
        trace: report.trace.clone(),
        iterations: report.iterations,
        converged: report.converged,
        aic_standard: criteria.aic_standard,
        aic_paper: criteria.aic_paper,
        bic: criteria.bic,
        meta: MetaDoc {
            data,
            columns,
            n_obs,
            n_components: report.params.dim(),
            n_params: report.params.n_params(),
            quad_nodes: config.quad_nodes,
            tol: config.tol,
            max_iter: config.max_iter,
        },
    }
}

fn summary_table(doc: &FitDoc) -> String {
    let mut t = Table::new(vec![String::new(), String::new()]);
    t.push(vec!["family".into(), doc.family.clone()]);
    t.push(vec![
        "observations".into(),
        format!("{} x {}", doc.meta.n_obs, doc.meta.n_components),
    ]);
    t.push(vec![
        "converged".into(),
        format!("{} ({} iterations)", doc.converged, doc.iterations),
    ]);
    t.push(vec!["log-likelihood".into(), fmt4(doc.loglik)]);
    t.push(vec!["aic (-2L+k)".into(), fmt4(doc.aic_paper)]);
    t.push(vec!["aic (-2L+2k)".into(), fmt4(doc.aic_standard)]);
    t.push(vec!["bic".into(), fmt4(doc.bic)]);
    let join4 = |xs: &[f64]| xs.iter().map(|&v| fmt4(v)).collect::<Vec<_>>().join("  ");
    t.push(vec!["alpha".into(), join4(&doc.alpha)]);
    t.push(vec!["mu".into(), join4(&doc.mu)]);
    for (i, row) in doc.sigma.iter().enumerate() {
        let label = if i == 0 { "sigma".to_string() } else { String::new() };
        t.push(vec![label, join4(row)]);
    }
    t.render()
}

pub fn run(args: &FitArgs) -> CliResult<()> {
    let loaded = load_csv(&args.data)?;
    let family: Family = args.family.into();
    let config = FitConfig {
        quad_nodes: args.quad_nodes,
        tol: args.tol,
        max_iter: args.max_iter,
        init: None,
    };
    let (doc, _) = run_fit(&loaded.series, family, &config, &args.data.display().to_string(), loaded.names)?;
    print!("{}", summary_table(&doc));
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::input(format!("serializing report: {e}")))?;
        std::fs::write(path, json + "\n")
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Fit plus report assembly, shared with `compare`.
pub fn run_fit(
    series: &CountSeries,
    family: Family,
    config: &FitConfig,
    data: &str,
    columns: Vec<String>,
) -> CliResult<(FitDoc, FitReport)> {
    let report = fit(series, family, config)?;
    let criteria = information_criteria(report.loglik, report.params.n_params(), series.len());
    let doc = fit_doc(
        &report,
        &criteria,
        data.to_string(),
        columns,
        series.len(),
        config,
    );
    Ok((doc, report))
}
