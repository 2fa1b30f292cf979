//! The count autoregression itself: recursion `X_t = A ∘ X_{t-1} + R_t` with a
//! diagonal thinning matrix `A` and innovation vectors `R_t` from one of the
//! latent-Gaussian mixture families.

use rand::Rng;

use crate::linalg::{Matrix, SymMatrix};
use crate::mixtures::MixtureParams;
use crate::thinning::ThinningMatrix;
use crate::{Error, Result};

/// Default number of pre-sample steps discarded before a simulated path.
pub const DEFAULT_BURN_IN: usize = 500;

/// A multivariate count series, stored row-major (one row per time point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSeries {
    dim: usize,
    data: Vec<u64>,
}

impl CountSeries {
    pub fn new(dim: usize, data: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "series dimension must be at least 1".into(),
            ));
        }
        if data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * (data.len() / dim + 1),
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of time points.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, t: usize) -> &[u64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn max_count(&self) -> u64 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// Full model parameters: thinning rates plus the innovation mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    thinning: ThinningMatrix,
    innovations: MixtureParams,
}

impl ModelParams {
    pub fn new(thinning: ThinningMatrix, innovations: MixtureParams) -> Result<Self> {
        if thinning.dim() != innovations.dim() {
            return Err(Error::DimensionMismatch {
                expected: thinning.dim(),
                got: innovations.dim(),
            });
        }
        Ok(Self {
            thinning,
            innovations,
        })
    }

    pub fn dim(&self) -> usize {
        self.thinning.dim()
    }

    pub fn alpha(&self) -> &[f64] {
        self.thinning.rates()
    }

    pub fn thinning(&self) -> &ThinningMatrix {
        &self.thinning
    }

    pub fn innovations(&self) -> &MixtureParams {
        &self.innovations
    }

    /// Number of free parameters: one thinning rate and one latent mean per
    /// component, plus the distinct entries of the latent covariance.
    pub fn n_params(&self) -> usize {
        let n = self.dim();
        2 * n + n * (n + 1) / 2
    }
}

/// Simulates a path of length `t_len`.
///
/// The chain starts from a single innovation draw, runs `burn_in + t_len`
/// recursion steps, and returns only the final `t_len` points.
pub fn simulate<R: Rng + ?Sized>(
    params: &ModelParams,
    t_len: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<CountSeries> {
    if t_len == 0 {
        return Err(Error::InvalidParameter(
            "simulated length must be at least 1".into(),
        ));
    }
    let sampler = params.innovations.sampler()?;
    let mut state = sampler.sample(rng);
    let mut data = Vec::with_capacity(t_len * params.dim());
    for step in 0..burn_in + t_len {
        let survivors = params.thinning.apply(&state, rng)?;
        let innov = sampler.sample(rng);
        state = survivors
            .iter()
            .zip(&innov)
            .map(|(&a, &b)| a + b)
            .collect();
        if step >= burn_in {
            data.extend_from_slice(&state);
        }
    }
    CountSeries::new(params.dim(), data)
}

/// Stationary moments implied by the parameters.
#[derive(Debug, Clone)]
pub struct ProcessMoments {
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
    alpha: Vec<f64>,
}

impl ProcessMoments {
    /// Lag-`h` cross-covariance matrix `Cov(X_{t+h}, X_t)`.
    ///
    /// Entry `(i, j)` is `alpha_i^h` times the stationary covariance, so the
    /// result is not symmetric once thinning rates differ across components.
    pub fn autocov(&self, h: usize) -> Matrix {
        Matrix::from_fn(self.alpha.len(), |i, j| {
            self.alpha[i].powi(h as i32) * self.cov.get(i, j)
        })
    }
}

/// Closed-form stationary mean and covariance.
pub fn process_moments(params: &ModelParams) -> ProcessMoments {
    let n = params.dim();
    let alpha = params.alpha().to_vec();
    let innov = params.innovations().moments();
    let mean: Vec<f64> = (0..n).map(|i| innov.mean[i] / (1.0 - alpha[i])).collect();
    let cov = SymMatrix::from_fn(n, |i, j| {
        if i == j {
            (alpha[i] * innov.mean[i] + innov.cov.get(i, i)) / (1.0 - alpha[i] * alpha[i])
        } else {
            innov.cov.get(i, j) / (1.0 - alpha[i] * alpha[j])
        }
    });
    ProcessMoments { mean, cov, alpha }
}

/// Sample moments of an observed series.
#[derive(Debug, Clone)]
pub struct EmpiricalMoments {
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
    /// `cross_cov[h - 1]` estimates `Cov(X_{t+h}, X_t)` for `h = 1..=max_lag`.
    pub cross_cov: Vec<Matrix>,
}

impl EmpiricalMoments {
    /// Lag-one autocorrelation of component `s`.
    pub fn lag1_autocorr(&self, s: usize) -> f64 {
        self.cross_cov[0].get(s, s) / self.cov.get(s, s)
    }
}

/// Sample mean, covariance, and lag cross-covariances up to `max_lag`.
pub fn empirical_moments(series: &CountSeries, max_lag: usize) -> Result<EmpiricalMoments> {
    let t_len = series.len();
    let n = series.dim();
    if max_lag == 0 {
        return Err(Error::InvalidParameter("max_lag must be at least 1".into()));
    }
    if t_len < max_lag + 2 {
        return Err(Error::SeriesTooShort {
            min: max_lag + 2,
            got: t_len,
        });
    }
    let mut mean = vec![0.0; n];
    for row in series.rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v as f64;
        }
    }
    for m in &mut mean {
        *m /= t_len as f64;
    }
    let centered = |t: usize, s: usize| series.row(t)[s] as f64 - mean[s];
    let cov = SymMatrix::from_fn(n, |i, j| {
        (0..t_len).map(|t| centered(t, i) * centered(t, j)).sum::<f64>() / (t_len - 1) as f64
    });
    let cross_cov = (1..=max_lag)
        .map(|h| {
            Matrix::from_fn(n, |i, j| {
                (0..t_len - h)
                    .map(|t| centered(t + h, i) * centered(t, j))
                    .sum::<f64>()
                    / (t_len - h - 1) as f64
            })
        })
        .collect();
    Ok(EmpiricalMoments {
        mean,
        cov,
        cross_cov,
    })
}
