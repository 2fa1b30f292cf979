//! EM estimation.
//!
//! The complete-data likelihood treats both latent layers as missing: the
//! survivor counts `Z_t` and the latent Gaussian vectors `eta_t`. The E-step
//! evaluates their posterior summaries on the Gauss-Hermite grid built from
//! the current parameters; the M-step is then closed form: thinning rates from
//! survivor totals, latent means from posterior means, and the latent
//! covariance from posterior second moments about the fresh mean. The
//! quadrature rule is rebuilt from the updated parameters before each E-step.

use crate::exec;
use crate::likelihood::{transition_node_terms, NodeKernels, MAX_COUNT};
use crate::linalg::SymMatrix;
use crate::math::{logsumexp, pairwise_sum};
use crate::mixtures::{Family, MixtureParams, MU_BOUND, SIGMA_DIAG_BOUND};
use crate::process::{empirical_moments, CountSeries, ModelParams};
use crate::quadrature::{build_rule, QuadRule};
use crate::thinning::ThinningMatrix;
use crate::{Error, Result};

/// Thinning rates are kept at least this far inside (0, 1).
pub const ALPHA_FLOOR: f64 = 1e-4;

/// Latent variances are floored here by the M-step.
pub const SIGMA_DIAG_FLOOR: f64 = 1e-6;

/// Posterior summaries for one transition.
#[derive(Debug, Clone)]
pub struct EStepSummary {
    /// `E[Z_s]`: expected survivor count per component.
    pub ez: Vec<f64>,
    /// `E[eta]`: posterior mean of the latent vector.
    pub eeta: Vec<f64>,
    /// `E[eta eta^T]`: posterior second moment (uncentered).
    pub eeta_sq: SymMatrix,
    /// Log of the transition probability (the posterior normalizer).
    pub loglik_t: f64,
}

fn check_series(series: &CountSeries, params: &ModelParams) -> Result<()> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            min: 2,
            got: series.len(),
        });
    }
    if series.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: series.dim(),
        });
    }
    if series.max_count() > MAX_COUNT {
        return Err(Error::CountTooLarge {
            value: series.max_count(),
            max: MAX_COUNT,
        });
    }
    Ok(())
}

/// Posterior summaries for every transition, under `rule` built from the
/// current parameters. `loglik_t` values sum to the same conditional
/// log-likelihood that [`crate::likelihood::log_likelihood`] reports.
pub fn e_step(
    series: &CountSeries,
    params: &ModelParams,
    rule: &QuadRule,
) -> Result<Vec<EStepSummary>> {
    check_series(series, params)?;
    if rule.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: rule.dim(),
        });
    }
    let dim = params.dim();
    let kernels = NodeKernels::new(params.innovations().family(), rule);
    let results = exec::map_indices(series.len() - 1, |i| -> Result<EStepSummary> {
        let mut zbar = Vec::new();
        let terms = transition_node_terms(
            series.row(i),
            series.row(i + 1),
            params,
            &kernels,
            rule,
            Some(&mut zbar),
        )?;
        let loglik_t = logsumexp(&terms);
        if loglik_t == f64::NEG_INFINITY {
            return Err(Error::NumericalUnderflow { t: i + 1 });
        }
        let mut ez = vec![0.0; dim];
        let mut eeta = vec![0.0; dim];
        let mut eeta_sq = SymMatrix::zeros(dim);
        for q in 0..rule.len() {
            let weight = (terms[q] - loglik_t).exp();
            if weight == 0.0 {
                continue;
            }
            let node = rule.node(q);
            for s in 0..dim {
                ez[s] += weight * zbar[q * dim + s];
                eeta[s] += weight * node[s];
                for u in s..dim {
                    let v = eeta_sq.get(s, u) + weight * node[s] * node[u];
                    eeta_sq.set(s, u, v);
                }
            }
        }
        Ok(EStepSummary {
            ez,
            eeta,
            eeta_sq,
            loglik_t,
        })
    });
    results.into_iter().collect()
}

/// Floors the diagonal, caps it at the parameter box, and shrinks
/// off-diagonal entries until the matrix factorizes.
fn regularize_sigma(sigma: &mut SymMatrix) -> Result<()> {
    let n = sigma.dim();
    for s in 0..n {
        let v = sigma.get(s, s);
        sigma.set(s, s, v.clamp(SIGMA_DIAG_FLOOR, SIGMA_DIAG_BOUND));
    }
    for attempt in 0..200 {
        if sigma.cholesky().is_ok() {
            return Ok(());
        }
        let shrink = 0.95_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                sigma.set(i, j, sigma.get(i, j) * shrink);
            }
        }
        if attempt == 199 {
            break;
        }
    }
    sigma.cholesky().map(|_| ())
}

/// Closed-form M-step from posterior summaries.
pub fn m_step(
    series: &CountSeries,
    family: Family,
    summaries: &[EStepSummary],
) -> Result<ModelParams> {
    let dim = series.dim();
    let nt = summaries.len();
    if nt == 0 || series.len() != nt + 1 {
        return Err(Error::DimensionMismatch {
            expected: series.len().saturating_sub(1),
            got: nt,
        });
    }

    let mut alpha = vec![0.0; dim];
    for s in 0..dim {
        let ez_total: f64 = summaries.iter().map(|sm| sm.ez[s]).sum();
        let prev_total: f64 = (0..nt).map(|t| series.row(t)[s] as f64).sum();
        let raw = if prev_total > 0.0 {
            ez_total / prev_total
        } else {
            ALPHA_FLOOR
        };
        alpha[s] = raw.clamp(ALPHA_FLOOR, 1.0 - ALPHA_FLOOR);
    }

    let mut mu = vec![0.0; dim];
    for s in 0..dim {
        let total: f64 = summaries.iter().map(|sm| sm.eeta[s]).sum();
        mu[s] = (total / nt as f64).clamp(-MU_BOUND, MU_BOUND);
    }

    let mut sigma = SymMatrix::from_fn(dim, |s, u| {
        let total: f64 = summaries.iter().map(|sm| sm.eeta_sq.get(s, u)).sum();
        total / nt as f64 - mu[s] * mu[u]
    });
    regularize_sigma(&mut sigma)?;

    ModelParams::new(
        ThinningMatrix::new(alpha)?,
        MixtureParams::new(family, mu, sigma)?,
    )
}

/// Inverts the closed-form innovation moments back to latent parameters.
/// Components where the inversion leaves the valid region fall back to
/// `mu = ±log(max(mean, 0.1))`, `sigma_ss = 0.25`.
fn invert_innovation_moments(
    family: Family,
    mean: &[f64],
    cov: &SymMatrix,
) -> (Vec<f64>, SymMatrix) {
    let n = mean.len();
    let mut mu = vec![0.0; n];
    let mut diag = vec![0.25; n];
    for s in 0..n {
        let m = mean[s];
        let fallback_mu = match family {
            Family::PoissonLognormal => m.max(0.1).ln(),
            Family::GeometricLogitnormal => -m.max(0.1).ln(),
        };
        if m <= 0.0 {
            mu[s] = fallback_mu;
            continue;
        }
        let excess = (cov.get(s, s) - m) / (m * m);
        let arg = match family {
            Family::PoissonLognormal => 1.0 + excess,
            Family::GeometricLogitnormal => (1.0 + excess) / 2.0,
        };
        if arg > 1.0 && arg.ln() <= SIGMA_DIAG_BOUND {
            let var = arg.ln();
            diag[s] = var;
            mu[s] = match family {
                Family::PoissonLognormal => m.ln() - 0.5 * var,
                Family::GeometricLogitnormal => 0.5 * var - m.ln(),
            };
        } else {
            mu[s] = fallback_mu;
        }
        mu[s] = mu[s].clamp(-MU_BOUND, MU_BOUND);
    }
    let sigma = SymMatrix::from_fn(n, |s, u| {
        if s == u {
            diag[s]
        } else {
            let denom = mean[s] * mean[u];
            if denom > 0.0 {
                let arg = 1.0 + cov.get(s, u) / denom;
                if arg > 0.0 {
                    arg.ln()
                } else {
                    0.0
                }
            } else {
                0.0
            }
        }
    });
    (mu, sigma)
}

/// Moment-based starting point: thinning rates from lag-one autocorrelations,
/// then innovation moments inverted through the stationary relations.
///
/// Components with zero sample variance (all-zero or constant series) are
/// rejected with [`Error::DegenerateSeries`].
pub fn initialize(series: &CountSeries, family: Family) -> Result<ModelParams> {
    let emp = empirical_moments(series, 1)?;
    let n = series.dim();
    let mut alpha = vec![0.0; n];
    for s in 0..n {
        if emp.cov.get(s, s) <= 0.0 {
            let reason = if emp.mean[s] == 0.0 {
                "all zero"
            } else {
                "constant"
            };
            return Err(Error::DegenerateSeries {
                component: s,
                reason,
            });
        }
        alpha[s] = emp.lag1_autocorr(s).clamp(0.05, 0.95);
    }
    let innov_mean: Vec<f64> = (0..n).map(|s| (1.0 - alpha[s]) * emp.mean[s]).collect();
    let innov_cov = SymMatrix::from_fn(n, |s, u| {
        if s == u {
            (1.0 - alpha[s] * alpha[s]) * emp.cov.get(s, s) - alpha[s] * innov_mean[s]
        } else {
            (1.0 - alpha[s] * alpha[u]) * emp.cov.get(s, u)
        }
    });
    let (mu, mut sigma) = invert_innovation_moments(family, &innov_mean, &innov_cov);
    regularize_sigma(&mut sigma)?;
    ModelParams::new(
        ThinningMatrix::new(alpha)?,
        MixtureParams::new(family, mu, sigma)?,
    )
}

/// Fit configuration; the defaults match the estimation tolerances used for
/// the bundled study presets.
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Gauss-Hermite nodes per latent dimension.
    pub quad_nodes: usize,
    /// Relative log-likelihood change that counts as converged.
    pub tol: f64,
    /// EM iteration cap.
    pub max_iter: usize,
    /// Optional explicit starting point; otherwise [`initialize`] is used.
    pub init: Option<ModelParams>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            quad_nodes: 15,
            tol: 1e-6,
            max_iter: 500,
            init: None,
        }
    }
}

/// Outcome of one EM run.
#[derive(Debug, Clone)]
pub struct FitReport {
    /// Final parameters (last M-step output).
    pub params: ModelParams,
    /// Log-likelihood at the last E-step.
    pub loglik: f64,
    /// Log-likelihood after each E-step, oldest first.
    pub trace: Vec<f64>,
    /// Number of EM iterations performed.
    pub iterations: usize,
    /// Whether the relative change dropped below `tol` before `max_iter`.
    pub converged: bool,
}

/// Runs EM to convergence.
///
/// Convergence compares consecutive E-step log-likelihoods, so the earliest
/// possible stop is after the second iteration.
pub fn fit(series: &CountSeries, family: Family, config: &FitConfig) -> Result<FitReport> {
    let mut params = match &config.init {
        Some(p) => {
            if p.innovations().family() != family {
                return Err(Error::FamilyMismatch {
                    expected: family,
                    got: p.innovations().family(),
                });
            }
            p.clone()
        }
        None => initialize(series, family)?,
    };
    check_series(series, &params)?;

    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let rule = build_rule(
            params.innovations().mu(),
            params.innovations().sigma(),
            config.quad_nodes,
        )?;
        let summaries = e_step(series, &params, &rule)?;
        let terms: Vec<f64> = summaries.iter().map(|s| s.loglik_t).collect();
        let loglik = pairwise_sum(&terms);
        params = m_step(series, family, &summaries)?;
        if let Some(&prev) = trace.last() {
            if (loglik - prev).abs() / (loglik.abs() + 1.0) < config.tol {
                trace.push(loglik);
                converged = true;
                break;
            }
        }
        trace.push(loglik);
    }
    Ok(FitReport {
        params,
        loglik: *trace.last().expect("at least one iteration"),
        trace,
        iterations,
        converged,
    })
}

/// Likelihood-based model comparison criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationCriteria {
    /// `-2 logL + 2k`.
    pub aic_standard: f64,
    /// `-2 logL + k`: the penalty convention used by the comparison tables.
    pub aic_paper: f64,
    /// `-2 logL + k ln(n)`.
    pub bic: f64,
}

/// Computes all three criteria for a model with `k` free parameters fitted to
/// `n` observations (for conditional likelihoods, callers conventionally pass
/// the full series length).
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> InformationCriteria {
    let minus2 = -2.0 * loglik;
    InformationCriteria {
        aic_standard: minus2 + 2.0 * k as f64,
        aic_paper: minus2 + k as f64,
        bic: minus2 + k as f64 * (n as f64).ln(),
    }
}
