//! Cross-correlated count innovations built from a latent Gaussian vector.
//!
//! Two families share the same latent structure `eta ~ N(mu, Sigma)`:
//!
//! * Poisson-lognormal: component `s` is Poisson with rate `exp(eta_s)`;
//! * geometric-logitnormal: component `s` is geometric on `{0, 1, 2, ...}`
//!   (failures before the first success) with success probability
//!   `sigmoid(eta_s)`.
//!
//! Correlation between counts enters only through `Sigma`. Probabilities are
//! integrals over the latent vector and are evaluated with a caller-supplied
//! Gauss-Hermite rule built from the same `(mu, Sigma)`.

use rand::Rng;
use rand_distr::Distribution;

use crate::linalg::{Cholesky, SymMatrix};
use crate::math::{sigmoid, softplus};
use crate::quadrature::{integrate, QuadRule};
use crate::{Error, Result};

/// Innovation family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    PoissonLognormal,
    GeometricLogitnormal,
}

impl Family {
    /// Short code used by the command line and serialized configs.
    pub fn code(self) -> &'static str {
        match self {
            Family::PoissonLognormal => "pl",
            Family::GeometricLogitnormal => "gl",
        }
    }

    /// Parses the short code (`"pl"` or `"gl"`).
    pub fn parse(code: &str) -> Result<Self> {
        match code {
            "pl" => Ok(Family::PoissonLognormal),
            "gl" => Ok(Family::GeometricLogitnormal),
            other => Err(Error::InvalidParameter(format!(
                "unknown innovation family {other:?}; expected \"pl\" or \"gl\""
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Largest latent mean magnitude accepted at the API boundary.
pub const MU_BOUND: f64 = 20.0;

/// Largest latent variance accepted at the API boundary.
pub const SIGMA_DIAG_BOUND: f64 = 25.0;

/// Log kernel of one component given its latent coordinate.
pub(crate) fn log_kernel(family: Family, count: u64, eta: f64) -> f64 {
    match family {
        Family::PoissonLognormal => {
            count as f64 * eta - eta.exp() - crate::math::ln_factorial(count)
        }
        Family::GeometricLogitnormal => eta - (count as f64 + 1.0) * softplus(eta),
    }
}

/// Innovation mean vector and covariance matrix in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationMoments {
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
}

/// First derivatives of the joint PMF at one count vector.
#[derive(Debug, Clone)]
pub struct PmfDerivatives {
    /// The PMF value itself (probability scale).
    pub pmf: f64,
    /// Derivative with respect to each latent mean.
    pub d_mu: Vec<f64>,
    /// Derivative with respect to each covariance entry, treating `sigma_st`
    /// (one entry of the symmetric pair) as the free parameter.
    pub d_sigma: SymMatrix,
}

/// Parameters of one innovation mixture: family plus latent `(mu, Sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    family: Family,
    mu: Vec<f64>,
    sigma: SymMatrix,
}

impl MixtureParams {
    /// Validates dimensions, the parameter box, and positive definiteness.
    pub fn new(family: Family, mu: Vec<f64>, sigma: SymMatrix) -> Result<Self> {
        if sigma.dim() != mu.len() {
            return Err(Error::DimensionMismatch {
                expected: mu.len(),
                got: sigma.dim(),
            });
        }
        if mu.is_empty() {
            return Err(Error::InvalidParameter(
                "innovation dimension must be at least 1".into(),
            ));
        }
        for (s, &m) in mu.iter().enumerate() {
            if !m.is_finite() || m.abs() > MU_BOUND {
                return Err(Error::InvalidParameter(format!(
                    "mu[{s}] = {m} outside [-{MU_BOUND}, {MU_BOUND}]"
                )));
            }
        }
        for s in 0..sigma.dim() {
            let v = sigma.get(s, s);
            if !v.is_finite() || v > SIGMA_DIAG_BOUND {
                return Err(Error::InvalidParameter(format!(
                    "sigma[{s}][{s}] = {v} outside (0, {SIGMA_DIAG_BOUND}]"
                )));
            }
        }
        sigma.cholesky()?;
        Ok(Self { family, mu, sigma })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Builds the Gauss-Hermite rule matched to this mixture's latent Gaussian.
    pub fn quad_rule(&self, nodes_per_dim: usize) -> Result<QuadRule> {
        crate::quadrature::build_rule(&self.mu, &self.sigma, nodes_per_dim)
    }

    /// Joint log PMF at `r`, evaluated with `rule` (which must have been built
    /// from this mixture's `(mu, Sigma)`).
    pub fn log_pmf(&self, r: &[u64], rule: &QuadRule) -> Result<f64> {
        if r.len() != self.dim() || rule.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: if r.len() != self.dim() {
                    r.len()
                } else {
                    rule.dim()
                },
            });
        }
        let family = self.family;
        Ok(integrate(rule, |eta| {
            r.iter()
                .zip(eta)
                .map(|(&count, &e)| log_kernel(family, count, e))
                .sum()
        }))
    }

    /// Mean and covariance of the count vector in closed form.
    pub fn moments(&self) -> InnovationMoments {
        let n = self.dim();
        let mean: Vec<f64> = (0..n)
            .map(|i| match self.family {
                Family::PoissonLognormal => (self.mu[i] + 0.5 * self.sigma.get(i, i)).exp(),
                Family::GeometricLogitnormal => (-self.mu[i] + 0.5 * self.sigma.get(i, i)).exp(),
            })
            .collect();
        let cov = SymMatrix::from_fn(n, |i, j| {
            if i == j {
                let factor = match self.family {
                    Family::PoissonLognormal => self.sigma.get(i, i).exp() - 1.0,
                    Family::GeometricLogitnormal => 2.0 * self.sigma.get(i, i).exp() - 1.0,
                };
                mean[i] + mean[i] * mean[i] * factor
            } else {
                mean[i] * mean[j] * (self.sigma.get(i, j).exp() - 1.0)
            }
        });
        InnovationMoments { mean, cov }
    }

    /// PMF derivatives with respect to `mu` and `Sigma` by the shifted-count
    /// recursions; every probability is evaluated under the same `rule`.
    ///
    /// For rates, writing `P(r)` for the PMF and `e_s` for a unit count bump:
    /// the Poisson-lognormal mean derivative is
    /// `r_s P(r) - (r_s + 1) P(r + e_s)`, the geometric-logitnormal one flips
    /// sign, and both families share the covariance combinations built from
    /// `P(r)`, `P(r + e_s)`, `P(r + e_t)`, and `P(r + e_s + e_t)`.
    pub fn pmf_derivatives(&self, r: &[u64], rule: &QuadRule) -> Result<PmfDerivatives> {
        let n = self.dim();
        let p = self.log_pmf(r, rule)?.exp();
        let mut shifted = r.to_vec();
        let p_plus: Vec<f64> = (0..n)
            .map(|s| {
                shifted[s] += 1;
                let v = self.log_pmf(&shifted, rule).map(f64::exp);
                shifted[s] -= 1;
                v
            })
            .collect::<Result<_>>()?;
        let mut p_plus2 = SymMatrix::zeros(n);
        for s in 0..n {
            for t in s..n {
                shifted[s] += 1;
                shifted[t] += 1;
                p_plus2.set(s, t, self.log_pmf(&shifted, rule)?.exp());
                shifted[s] -= 1;
                shifted[t] -= 1;
            }
        }

        let d_mu: Vec<f64> = (0..n)
            .map(|s| {
                let rs = r[s] as f64;
                match self.family {
                    Family::PoissonLognormal => rs * p - (rs + 1.0) * p_plus[s],
                    Family::GeometricLogitnormal => (rs + 1.0) * p_plus[s] - rs * p,
                }
            })
            .collect();
        let d_sigma = SymMatrix::from_fn(n, |s, t| {
            let rs = r[s] as f64;
            let rt = r[t] as f64;
            if s == t {
                0.5 * (rs * rs * p - (rs + 1.0) * (2.0 * rs + 1.0) * p_plus[s]
                    + (rs + 1.0) * (rs + 2.0) * p_plus2.get(s, s))
            } else {
                0.5 * (rs * rt * p - rs * (rt + 1.0) * p_plus[t] - rt * (rs + 1.0) * p_plus[s]
                    + (rs + 1.0) * (rt + 1.0) * p_plus2.get(s, t))
            }
        });
        Ok(PmfDerivatives {
            pmf: p,
            d_mu,
            d_sigma,
        })
    }

    /// Prepares a sampler; the Cholesky factor is computed once up front.
    pub fn sampler(&self) -> Result<MixtureSampler> {
        Ok(MixtureSampler {
            family: self.family,
            mu: self.mu.clone(),
            chol: self.sigma.cholesky()?,
        })
    }

    /// Draws one innovation vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u64>> {
        Ok(self.sampler()?.sample(rng))
    }
}

/// Reusable exact sampler for one innovation mixture.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    family: Family,
    mu: Vec<f64>,
    chol: Cholesky,
}

impl MixtureSampler {
    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// One exact draw: latent Gaussian first, then conditionally independent
    /// counts component by component.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let z: Vec<f64> = (0..self.mu.len())
            .map(|_| rand_distr::StandardNormal.sample(rng))
            .collect();
        let shift = self.chol.transform(&z);
        self.mu
            .iter()
            .zip(&shift)
            .map(|(&m, &s)| {
                let eta = m + s;
                match self.family {
                    Family::PoissonLognormal => {
                        let rate = eta.exp();
                        let draw: f64 = rand_distr::Poisson::new(rate)
                            .expect("positive Poisson rate")
                            .sample(rng);
                        draw as u64
                    }
                    Family::GeometricLogitnormal => rand_distr::Geometric::new(sigmoid(eta))
                        .expect("success probability in (0, 1)")
                        .sample(rng),
                }
            })
            .collect()
    }
}
