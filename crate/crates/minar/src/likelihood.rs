//! Conditional likelihood of the count autoregression.
//!
//! One transition mixes two latent layers: the survivor count of each
//! component (binomial given the previous observation) and the innovation
//! vector (counts coupled through the latent Gaussian). Conditional on a
//! latent point `eta`, components are independent, so the transition
//! probability factorizes inside the quadrature sum:
//!
//! `f(x_t | x_{t-1}) = sum_q w_q * prod_s sum_{k_s} Bin(k_s) g_s(x_{s,t} - k_s | eta_q)`
//!
//! which costs `nodes * sum_s (m_s + 1)` kernel evaluations instead of the
//! `prod_s (m_s + 1)` joint enumeration. The enumeration route is kept as a
//! public reference implementation for validation.

use crate::exec;
use crate::math::{logsumexp, pairwise_sum};
use crate::mixtures::Family;
use crate::process::{CountSeries, ModelParams};
use crate::quadrature::QuadRule;
use crate::{Error, Result};

/// Largest observed count the likelihood kernels accept.
pub const MAX_COUNT: u64 = 100_000;

/// log of the binomial PMF `P(K = k)` for `K ~ Bin(n, alpha)`.
pub fn binomial_log_pmf(n: u64, k: u64, alpha: f64) -> Result<f64> {
    if k > n {
        return Err(Error::OutOfSupport { k, x_prev: n });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "binomial probability {alpha} outside [0, 1]"
        )));
    }
    if alpha == 0.0 {
        return Ok(if k == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if alpha == 1.0 {
        return Ok(if k == n { 0.0 } else { f64::NEG_INFINITY });
    }
    let n_f = n as f64;
    let k_f = k as f64;
    Ok(crate::math::ln_factorial(n) - crate::math::ln_factorial(k)
        - crate::math::ln_factorial(n - k)
        + k_f * alpha.ln()
        + (n_f - k_f) * (1.0 - alpha).ln())
}

/// Per-(node, component) transcendentals precomputed once per sweep, making a
/// single kernel evaluation a couple of flops plus a table lookup.
pub(crate) struct NodeKernels {
    family: Family,
    dim: usize,
    /// The latent coordinate at each (node, component).
    eta: Vec<f64>,
    /// `exp(eta)` for rates, `softplus(eta)` for success logits.
    transform: Vec<f64>,
}

impl NodeKernels {
    pub(crate) fn new(family: Family, rule: &QuadRule) -> Self {
        let dim = rule.dim();
        let mut eta = Vec::with_capacity(rule.len() * dim);
        let mut transform = Vec::with_capacity(rule.len() * dim);
        for q in 0..rule.len() {
            for &e in rule.node(q) {
                eta.push(e);
                transform.push(match family {
                    Family::PoissonLognormal => e.exp(),
                    Family::GeometricLogitnormal => crate::math::softplus(e),
                });
            }
        }
        Self {
            family,
            dim,
            eta,
            transform,
        }
    }

    /// log innovation kernel of component `s` at node `q` for `count`.
    #[inline]
    pub(crate) fn log_innov(&self, q: usize, s: usize, count: u64) -> f64 {
        let idx = q * self.dim + s;
        let c = count as f64;
        match self.family {
            Family::PoissonLognormal => {
                c * self.eta[idx] - self.transform[idx] - crate::math::ln_factorial(count)
            }
            Family::GeometricLogitnormal => self.eta[idx] - (c + 1.0) * self.transform[idx],
        }
    }
}

fn check_dims(params: &ModelParams, rule: &QuadRule, row_len: usize) -> Result<()> {
    if row_len != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: row_len,
        });
    }
    if rule.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: rule.dim(),
        });
    }
    Ok(())
}

fn check_counts(values: &[u64]) -> Result<()> {
    for &v in values {
        if v > MAX_COUNT {
            return Err(Error::CountTooLarge {
                value: v,
                max: MAX_COUNT,
            });
        }
    }
    Ok(())
}

/// Log binomial PMF table over `k = 0..=min(x_prev, x_curr)` for one component.
fn survivor_log_pmfs(x_prev: u64, x_curr: u64, alpha: f64) -> Vec<f64> {
    let m = x_prev.min(x_curr);
    (0..=m)
        .map(|k| binomial_log_pmf(x_prev, k, alpha).expect("k <= x_prev by construction"))
        .collect()
}

/// Per-node log terms `log w_q + sum_s log S_sq` for one transition.
///
/// When `posterior_z` is provided it is filled with the conditional survivor
/// means `E[Z_s | eta_q, x]` laid out as `nodes x dim`.
pub(crate) fn transition_node_terms(
    x_prev: &[u64],
    x_curr: &[u64],
    params: &ModelParams,
    kernels: &NodeKernels,
    rule: &QuadRule,
    mut posterior_z: Option<&mut Vec<f64>>,
) -> Result<Vec<f64>> {
    let dim = params.dim();
    let alpha = params.alpha();
    let binom: Vec<Vec<f64>> = (0..dim)
        .map(|s| survivor_log_pmfs(x_prev[s], x_curr[s], alpha[s]))
        .collect();
    if let Some(z) = posterior_z.as_deref_mut() {
        z.clear();
        z.resize(rule.len() * dim, 0.0);
    }

    let mut terms = Vec::with_capacity(rule.len());
    let mut kbuf: Vec<f64> = Vec::new();
    for q in 0..rule.len() {
        let mut acc = rule.log_weight(q);
        for s in 0..dim {
            kbuf.clear();
            let mut best = f64::NEG_INFINITY;
            for (k, &lb) in binom[s].iter().enumerate() {
                let v = lb + kernels.log_innov(q, s, x_curr[s] - k as u64);
                kbuf.push(v);
                if v > best {
                    best = v;
                }
            }
            let mut total = 0.0;
            let mut weighted = 0.0;
            for (k, &v) in kbuf.iter().enumerate() {
                let w = (v - best).exp();
                total += w;
                weighted += k as f64 * w;
            }
            acc += best + total.ln();
            if let Some(z) = posterior_z.as_deref_mut() {
                z[q * dim + s] = weighted / total;
            }
        }
        terms.push(acc);
    }
    Ok(terms)
}

/// Log transition probability `log f(x_curr | x_prev)` by factorized quadrature.
pub fn transition_log_pmf(
    x_prev: &[u64],
    x_curr: &[u64],
    params: &ModelParams,
    rule: &QuadRule,
) -> Result<f64> {
    check_dims(params, rule, x_prev.len())?;
    check_dims(params, rule, x_curr.len())?;
    check_counts(x_prev)?;
    check_counts(x_curr)?;
    let kernels = NodeKernels::new(params.innovations().family(), rule);
    let terms = transition_node_terms(x_prev, x_curr, params, &kernels, rule, None)?;
    let ll = logsumexp(&terms);
    if ll == f64::NEG_INFINITY {
        return Err(Error::NumericalUnderflow { t: 0 });
    }
    Ok(ll)
}

/// Reference implementation of the transition probability by joint enumeration
/// of all survivor vectors. Cost grows as `prod_s (m_s + 1)`; meant for
/// validation on small counts, not production sweeps.
pub fn transition_log_pmf_enumerated(
    x_prev: &[u64],
    x_curr: &[u64],
    params: &ModelParams,
    rule: &QuadRule,
) -> Result<f64> {
    check_dims(params, rule, x_prev.len())?;
    check_dims(params, rule, x_curr.len())?;
    let dim = params.dim();
    let alpha = params.alpha();
    let caps: Vec<u64> = x_prev
        .iter()
        .zip(x_curr)
        .map(|(&a, &b)| a.min(b))
        .collect();
    let mut z = vec![0u64; dim];
    let mut terms = Vec::new();
    loop {
        let mut log_term = 0.0;
        for s in 0..dim {
            log_term += binomial_log_pmf(x_prev[s], z[s], alpha[s])?;
        }
        let residual: Vec<u64> = x_curr.iter().zip(&z).map(|(&x, &k)| x - k).collect();
        log_term += params.innovations().log_pmf(&residual, rule)?;
        terms.push(log_term);

        let mut carry = true;
        for s in (0..dim).rev() {
            if z[s] < caps[s] {
                z[s] += 1;
                carry = false;
                break;
            }
            z[s] = 0;
        }
        if carry {
            break;
        }
    }
    Ok(logsumexp(&terms))
}

fn per_transition_terms(
    series: &CountSeries,
    params: &ModelParams,
    rule: &QuadRule,
    sequential: bool,
) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            min: 2,
            got: series.len(),
        });
    }
    check_dims(params, rule, series.dim())?;
    check_counts(series.row(0))?;
    for t in 1..series.len() {
        check_counts(series.row(t))?;
    }
    let kernels = NodeKernels::new(params.innovations().family(), rule);
    let eval = |i: usize| -> Result<f64> {
        let terms = transition_node_terms(
            series.row(i),
            series.row(i + 1),
            params,
            &kernels,
            rule,
            None,
        )?;
        let ll = logsumexp(&terms);
        if ll == f64::NEG_INFINITY {
            return Err(Error::NumericalUnderflow { t: i + 1 });
        }
        Ok(ll)
    };
    let results = if sequential {
        exec::map_indices_seq(series.len() - 1, eval)
    } else {
        exec::map_indices(series.len() - 1, eval)
    };
    results.into_iter().collect()
}

/// Conditional log-likelihood of the whole series: the sum over transitions of
/// [`transition_log_pmf`], reduced by deterministic pairwise summation.
pub fn log_likelihood(series: &CountSeries, params: &ModelParams, rule: &QuadRule) -> Result<f64> {
    Ok(pairwise_sum(&per_transition_terms(
        series, params, rule, false,
    )?))
}

/// Sequential reference for [`log_likelihood`]; bit-identical results.
pub fn log_likelihood_seq(
    series: &CountSeries,
    params: &ModelParams,
    rule: &QuadRule,
) -> Result<f64> {
    Ok(pairwise_sum(&per_transition_terms(
        series, params, rule, true,
    )?))
}
