use crate::mixtures::Family;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by model construction, numerical kernels, and estimation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A symmetric matrix failed the Cholesky positivity check.
    #[error("matrix not positive definite: pivot {pivot:.6e} at index {index} is below the floor {floor:.1e}")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        floor: f64,
    },

    /// Two arguments disagreed on dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A tensor-product quadrature rule would exceed the node budget.
    #[error("quadrature rule with {requested} nodes exceeds the budget of {budget}")]
    NodeBudgetExceeded { requested: usize, budget: usize },

    /// Parameters were built for one innovation family but used with another.
    #[error("innovation family mismatch: expected {expected}, got {got}")]
    FamilyMismatch { expected: Family, got: Family },

    /// A series is too short for the requested computation.
    #[error("series too short: need at least {min} observations, got {got}")]
    SeriesTooShort { min: usize, got: usize },

    /// A series component carries no usable information (all zero or constant).
    #[error("degenerate series: component {component} is {reason}")]
    DegenerateSeries {
        component: usize,
        reason: &'static str,
    },

    /// Every quadrature node underflowed for some transition.
    #[error("numerical underflow: transition at t={t} has no posterior mass")]
    NumericalUnderflow { t: usize },

    /// A thinning count exceeded the previous observation.
    #[error("out of support: thinned count {k} exceeds previous value {x_prev}")]
    OutOfSupport { k: u64, x_prev: u64 },

    /// An observed count is beyond what the likelihood kernels support.
    #[error("count {value} exceeds the supported maximum {max}")]
    CountTooLarge { value: u64, max: u64 },

    /// A parameter value is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
