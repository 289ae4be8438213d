use thiserror::Error;

/// Errors raised by the modelling and numerics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An element or antenna index lies outside the array.
    #[error("{axis} index {index} out of range (|index| <= {limit})")]
    IndexRange { axis: &'static str, index: i64, limit: i64 },

    /// Sequence lengths disagree.
    #[error("shape mismatch: expected {expected} entries, got {actual}")]
    Shape { expected: usize, actual: usize },

    /// The scenario is missing a component or violates an invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// Quadrature could not reach the requested tolerance within its budget.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (estimate {estimate:e}, error {error_estimate:e})"
    )]
    NoConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
