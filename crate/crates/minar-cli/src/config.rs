//! JSON parameter documents: `{family, alpha, mu, sigma}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use minar::linalg::SymMatrix;
use minar::mixtures::{Family, MixtureParams};
use minar::process::ModelParams;
use minar::thinning::ThinningMatrix;
use minar::Error;

use crate::error::{CliError, CliResult};

/// On-disk model description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsDoc {
    /// `"pl"` or `"gl"`.
    pub family: String,
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

/// Reads and validates a parameter file; errors carry the offending key path.
pub fn load_params(path: &Path) -> CliResult<ModelParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let doc: ParamsDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    build_params(&doc).map_err(|e| match e {
        CliError::Input(msg) => CliError::input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Turns a document into validated model parameters.
pub fn build_params(doc: &ParamsDoc) -> CliResult<ModelParams> {
    let family = Family::parse(&doc.family)
        .map_err(|e| CliError::input(format!("family: {e}")))?;
    let sigma = SymMatrix::from_rows(&doc.sigma)
        .map_err(|e| CliError::input(format!("sigma: {e}")))?;
    let thinning = ThinningMatrix::new(doc.alpha.clone())
        .map_err(|e| CliError::input(format!("alpha: {e}")))?;
    let innovations = MixtureParams::new(family, doc.mu.clone(), sigma).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => CliError::input(format!("sigma: {e}")),
        other => CliError::input(format!("mu/sigma: {other}")),
    })?;
    ModelParams::new(thinning, innovations)
        .map_err(|e| CliError::input(format!("alpha/mu: {e}")))
}
