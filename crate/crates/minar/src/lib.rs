//! First-order multivariate integer-valued autoregression (MINAR(1)) driven by
//! binomial thinning, with cross-correlated count innovations built from a latent
//! Gaussian vector: Poisson-lognormal or geometric-logitnormal.
//!
//! The crate provides exact simulation, closed-form process moments, stable
//! log-likelihood evaluation through Gauss-Hermite quadrature, EM estimation with
//! closed-form M-steps, univariate baseline models, and likelihood-based model
//! comparison. The `parallel` feature (on by default) runs the per-transition
//! work and replication batches on a rayon pool; disabling it yields a fully
//! sequential build with identical results.

pub mod baselines;
pub mod em;
mod error;
mod exec;
pub mod likelihood;
pub mod linalg;
pub mod math;
pub mod mixtures;
pub mod process;
pub mod quadrature;
pub mod scenarios;
pub mod study;
pub mod thinning;

pub use error::{Error, Result};
