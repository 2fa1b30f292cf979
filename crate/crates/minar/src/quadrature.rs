//! Gauss-Hermite quadrature for expectations against multivariate normals.
//!
//! One-dimensional nodes come from the Golub-Welsch construction: eigenvalues
//! of the symmetric tridiagonal Jacobi matrix of the Hermite recurrence, with
//! weights read off the first eigenvector components. Multivariate rules are
//! tensor products mapped through the affine transform `mu + sqrt(2) L x`.

use crate::linalg::{Cholesky, SymMatrix};
use crate::math::logsumexp;
use crate::{Error, Result};

/// Hard cap on tensor-product rule size.
pub const NODE_BUDGET: usize = 200_000;

/// Largest supported one-dimensional node count.
pub const MAX_NODES_PER_DIM: usize = 64;

/// Nodes and weights of the m-point physicists' Gauss-Hermite rule
/// (weight function `exp(-x^2)`), nodes in ascending order.
///
/// Callers must keep `1 <= m <= 64`.
pub fn hermite_nodes(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(
        (1..=MAX_NODES_PER_DIM).contains(&m),
        "hermite_nodes requires 1 <= m <= {MAX_NODES_PER_DIM}, got {m}"
    );
    let mut diag = vec![0.0; m];
    let mut off: Vec<f64> = (0..m).map(|i| ((i + 1) as f64 / 2.0).sqrt()).collect();
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tridiag_eigen(&mut diag, &mut off, &mut z);

    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let mut nodes: Vec<f64> = order.iter().map(|&j| diag[j]).collect();
    let mut weights: Vec<f64> = order
        .iter()
        .map(|&j| sqrt_pi * z[j] * z[j]) // z[0*m + j]: first component of eigenvector j
        .collect();
    // The rule is symmetric by construction; enforce it bitwise so that odd
    // integrands cancel as cleanly as floating point allows.
    for i in 0..m / 2 {
        let k = m - 1 - i;
        let x = 0.5 * (nodes[k] - nodes[i]);
        nodes[k] = x;
        nodes[i] = -x;
        let w = 0.5 * (weights[i] + weights[k]);
        weights[i] = w;
        weights[k] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// QL with implicit shifts for a symmetric tridiagonal matrix, accumulating
/// the rotations into `z` so eigenvectors come out as columns.
fn tridiag_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal eigensolver failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0_f64;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Tensor-product quadrature rule targeting a specific `N(mu, Sigma)`.
///
/// `nodes[q]` lives in latent space and `log_weights[q]` holds the log of the
/// normalized weight, so `logsumexp(log_weights) == 0` and expectations are
/// plain weighted sums.
#[derive(Debug, Clone)]
pub struct QuadRule {
    dim: usize,
    nodes_per_dim: usize,
    nodes: Vec<Vec<f64>>,
    log_weights: Vec<f64>,
}

impl QuadRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.nodes_per_dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, q: usize) -> &[f64] {
        &self.nodes[q]
    }

    pub fn log_weight(&self, q: usize) -> f64 {
        self.log_weights[q]
    }
}

/// Builds the rule for `N(mu, sigma)` with `m` nodes per dimension.
pub fn build_rule(mu: &[f64], sigma: &SymMatrix, m: usize) -> Result<QuadRule> {
    let dim = mu.len();
    if sigma.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: sigma.dim(),
        });
    }
    if !(1..=MAX_NODES_PER_DIM).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "nodes per dimension must lie in 1..={MAX_NODES_PER_DIM}, got {m}"
        )));
    }
    let total = m
        .checked_pow(dim as u32)
        .filter(|&t| t <= NODE_BUDGET)
        .ok_or_else(|| Error::NodeBudgetExceeded {
            requested: m.saturating_pow(dim as u32),
            budget: NODE_BUDGET,
        })?;
    let chol = sigma.cholesky()?;
    Ok(tensor_rule(mu, &chol, m, dim, total))
}

fn tensor_rule(mu: &[f64], chol: &Cholesky, m: usize, dim: usize, total: usize) -> QuadRule {
    let (x, w) = hermite_nodes(m);
    let log_w: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let log_norm = -(dim as f64 / 2.0) * std::f64::consts::PI.ln();
    let sqrt2 = std::f64::consts::SQRT_2;

    let mut nodes = Vec::with_capacity(total);
    let mut log_weights = Vec::with_capacity(total);
    let mut digits = vec![0usize; dim];
    for _ in 0..total {
        let standard: Vec<f64> = digits.iter().map(|&d| sqrt2 * x[d]).collect();
        let shifted = chol.transform(&standard);
        let node: Vec<f64> = mu.iter().zip(&shifted).map(|(a, b)| a + b).collect();
        let lw: f64 = digits.iter().map(|&d| log_w[d]).sum::<f64>() + log_norm;
        nodes.push(node);
        log_weights.push(lw);
        for slot in digits.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    QuadRule {
        dim,
        nodes_per_dim: m,
        nodes,
        log_weights,
    }
}

/// log of `E[exp(log_f(eta))]` under the rule's Gaussian, via logsumexp.
pub fn integrate(rule: &QuadRule, log_f: impl Fn(&[f64]) -> f64) -> f64 {
    let terms: Vec<f64> = (0..rule.len())
        .map(|q| rule.log_weight(q) + log_f(rule.node(q)))
        .collect();
    logsumexp(&terms)
}
