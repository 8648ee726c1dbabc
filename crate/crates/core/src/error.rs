use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input data (lengths, parse failures).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Out-of-range construction parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested problem does not apply to the configuration.
    #[error("problem mismatch: {0}")]
    ProblemMismatch(String),

    #[error("gram matrix is not positive definite (leading minor {minor} is {value})")]
    NotPositiveDefinite { minor: usize, value: String },

    #[error("lift height {height} too small to certify the conversion; retry with at least {suggested}")]
    LiftTooSmall { height: String, suggested: String },

    #[error("search budget exceeded: {required} evaluations required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("prime {prime} is unusable for this model: {reason}; retry with another prime")]
    BadPrime { prime: u64, reason: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("no bundled witness for {0}; use the search module")]
    NotBundled(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Errors that indicate semantic mismatch rather than malformed input.
    pub fn is_semantic(&self) -> bool {
        matches!(
            self,
            Error::ProblemMismatch(_) | Error::Verification(_) | Error::LiftTooSmall { .. }
        )
    }
}
