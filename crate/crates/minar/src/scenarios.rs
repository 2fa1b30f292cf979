//! Built-in three-component parameter presets for the simulation study grid.
//!
//! A scenario label such as `A2B1C1` picks one thinning preset (`A1`-`A3`),
//! one latent mean preset (`B1`-`B2`), and one latent covariance preset
//! (`C1`: strong positive correlation, `C2`: mixed signs).

use crate::linalg::SymMatrix;
use crate::mixtures::{Family, MixtureParams};
use crate::process::ModelParams;
use crate::thinning::ThinningMatrix;
use crate::{Error, Result};

/// Series lengths conventionally swept by the study harness.
pub const DEFAULT_SIZES: [usize; 3] = [50, 100, 300];

/// Thinning-rate preset (`A1`, `A2`, or `A3`).
pub fn alpha_preset(code: &str) -> Option<Vec<f64>> {
    match code {
        "A1" => Some(vec![0.1, 0.3, 0.5]),
        "A2" => Some(vec![0.3, 0.3, 0.3]),
        "A3" => Some(vec![0.5, 0.5, 0.5]),
        _ => None,
    }
}

/// Latent mean preset (`B1` or `B2`).
pub fn mu_preset(code: &str) -> Option<Vec<f64>> {
    match code {
        "B1" => Some(vec![0.5, 0.5, 0.5]),
        "B2" => Some(vec![1.0, 1.0, 1.0]),
        _ => None,
    }
}

/// Latent covariance preset (`C1` or `C2`).
pub fn sigma_preset(code: &str) -> Option<SymMatrix> {
    match code {
        "C1" => Some(sigma_c1()),
        "C2" => Some(sigma_c2()),
        _ => None,
    }
}

/// Equal variances with strong positive latent correlation.
pub fn sigma_c1() -> SymMatrix {
    SymMatrix::from_rows(&[
        vec![0.64, 0.5709447, 0.5344570],
        vec![0.5709447, 0.64, 0.5919781],
        vec![0.5344570, 0.5919781, 0.64],
    ])
    .expect("C1 preset is symmetric")
}

/// Equal variances with one negative latent correlation.
pub fn sigma_c2() -> SymMatrix {
    SymMatrix::from_rows(&[
        vec![0.640, 0.320, -0.192],
        vec![0.320, 0.640, 0.192],
        vec![-0.192, 0.192, 0.640],
    ])
    .expect("C2 preset is symmetric")
}

/// One cell of the study grid, with its label and the true parameters.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: SymMatrix,
}

impl Scenario {
    /// Parses a six-character label like `A2B1C1` (case-insensitive).
    pub fn parse(label: &str) -> Result<Self> {
        let canon = label.trim().to_ascii_uppercase();
        let invalid = || {
            Error::InvalidParameter(format!(
                "scenario label {label:?} must combine A1-A3, B1-B2, and C1-C2, e.g. A2B1C1"
            ))
        };
        if canon.len() != 6 {
            return Err(invalid());
        }
        let alpha = alpha_preset(&canon[0..2]).ok_or_else(invalid)?;
        let mu = mu_preset(&canon[2..4]).ok_or_else(invalid)?;
        let sigma = sigma_preset(&canon[4..6]).ok_or_else(invalid)?;
        Ok(Self {
            label: canon,
            alpha,
            mu,
            sigma,
        })
    }

    /// The full grid, in `A`-major order.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(12);
        for a in ["A1", "A2", "A3"] {
            for b in ["B1", "B2"] {
                for c in ["C1", "C2"] {
                    out.push(Self::parse(&format!("{a}{b}{c}")).expect("grid labels are valid"));
                }
            }
        }
        out
    }

    /// True model parameters for this cell under the given family.
    pub fn model_params(&self, family: Family) -> Result<ModelParams> {
        ModelParams::new(
            ThinningMatrix::new(self.alpha.clone())?,
            MixtureParams::new(family, self.mu.clone(), self.sigma.clone())?,
        )
    }

    /// Flat list of parameter names matching [`Scenario::true_values`].
    pub fn parameter_names(dim: usize) -> Vec<String> {
        let mut names: Vec<String> = (1..=dim).map(|s| format!("alpha{s}")).collect();
        names.extend((1..=dim).map(|s| format!("mu{s}")));
        for i in 1..=dim {
            for j in i..=dim {
                names.push(format!("sigma{i}{j}"));
            }
        }
        names
    }

    /// True values flattened as `alpha, mu, upper-triangular sigma`.
    pub fn true_values(&self) -> Vec<f64> {
        flatten_params(&self.alpha, &self.mu, &self.sigma)
    }
}

/// Flattens `(alpha, mu, Sigma)` in the order used for study reporting.
pub fn flatten_params(alpha: &[f64], mu: &[f64], sigma: &SymMatrix) -> Vec<f64> {
    let n = alpha.len();
    let mut out = Vec::with_capacity(2 * n + n * (n + 1) / 2);
    out.extend_from_slice(alpha);
    out.extend_from_slice(mu);
    for i in 0..n {
        for j in i..n {
            out.push(sigma.get(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip_and_reject_garbage() {
        let s = Scenario::parse("a3b2c2").unwrap();
        assert_eq!(s.label, "A3B2C2");
        assert_eq!(s.alpha, vec![0.5, 0.5, 0.5]);
        assert_eq!(s.mu, vec![1.0, 1.0, 1.0]);
        assert!(Scenario::parse("A4B1C1").is_err());
        assert!(Scenario::parse("A1B1").is_err());
        assert!(Scenario::parse("A1B3C1").is_err());
    }

    #[test]
    fn grid_has_twelve_cells() {
        let all = Scenario::all();
        assert_eq!(all.len(), 12);
        assert_eq!(all[0].label, "A1B1C1");
        assert_eq!(all[11].label, "A3B2C2");
    }

    #[test]
    fn covariance_presets_are_positive_definite() {
        assert!(sigma_c1().cholesky().is_ok());
        assert!(sigma_c2().cholesky().is_ok());
    }

    #[test]
    fn both_families_accept_every_cell() {
        for s in Scenario::all() {
            assert!(s.model_params(Family::PoissonLognormal).is_ok());
            assert!(s.model_params(Family::GeometricLogitnormal).is_ok());
        }
    }

    #[test]
    fn flattened_names_align_with_values() {
        let s = Scenario::parse("A1B1C1").unwrap();
        let names = Scenario::parameter_names(3);
        let values = s.true_values();
        assert_eq!(names.len(), values.len());
        assert_eq!(names[0], "alpha1");
        assert_eq!(values[0], 0.1);
        assert_eq!(names[3], "mu1");
        assert_eq!(values[3], 0.5);
        assert_eq!(names[6], "sigma11");
        assert_eq!(values[6], 0.64);
        assert_eq!(names[7], "sigma12");
        assert_eq!(values[7], 0.5709447);
    }
}
