use thiserror::Error;

/// Errors raised by every module in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("numerical failure in {what} (residual {residual:.3e})")]
    NumericalFailure { what: String, residual: f64 },

    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    #[error("unsupported cone combination: {0}")]
    UnsupportedCombination(String),

    #[error("unsupported theory: {0}")]
    UnsupportedTheory(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    /// The effect cone of Bob's system is strictly smaller than the dual of
    /// its state cone, so the trade-off bound does not apply.
    #[error("impossibility bound inapplicable: {0}")]
    ImpossibilityInapplicable(String),

    #[error("solver did not reach optimality ({status}): {residuals}")]
    SolverFailure { status: String, residuals: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
