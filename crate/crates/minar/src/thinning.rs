//! Binomial thinning: the survival operator that plays the role of scalar
//! multiplication for count-valued autoregressions.

use rand::Rng;
use rand_distr::Distribution;

use crate::{Error, Result};

/// `alpha ∘ x`: each of the `x` units survives independently with probability
/// `alpha`. Boundary rates are allowed here (`0` thins everything away, `1`
/// keeps everything).
pub fn thin<R: Rng + ?Sized>(alpha: f64, x: u64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "thinning rate {alpha} outside [0, 1]"
        )));
    }
    if x == 0 || alpha == 0.0 {
        return Ok(0);
    }
    if alpha == 1.0 {
        return Ok(x);
    }
    let draw = rand_distr::Binomial::new(x, alpha)
        .expect("validated binomial parameters")
        .sample(rng);
    Ok(draw)
}

/// Diagonal matrix of thinning rates; the model requires every rate strictly
/// inside `(0, 1)` so the process stays stationary and identifiable.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinningMatrix {
    alpha: Vec<f64>,
}

impl ThinningMatrix {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidParameter(
                "thinning matrix needs at least one rate".into(),
            ));
        }
        for (s, &a) in alpha.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 || a >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "alpha[{s}] = {a} outside the open interval (0, 1)"
                )));
            }
        }
        Ok(Self { alpha })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn rates(&self) -> &[f64] {
        &self.alpha
    }

    /// Applies component-wise thinning to a count vector.
    pub fn apply<R: Rng + ?Sized>(&self, x: &[u64], rng: &mut R) -> Result<Vec<u64>> {
        if x.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                got: x.len(),
            });
        }
        x.iter()
            .zip(&self.alpha)
            .map(|(&xi, &a)| thin(a, xi, rng))
            .collect()
    }
}
