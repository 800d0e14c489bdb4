use thiserror::Error;

/// Errors raised by the group, character and certificate machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded: {what} reached {actual} (limit {limit})")]
    BudgetExceeded {
        what: &'static str,
        actual: u64,
        limit: u64,
    },
    #[error("generator {index} is not invertible modulo {modulus}")]
    NonInvertibleGenerator { index: usize, modulus: u32 },
    #[error("invalid group descriptor `{0}`")]
    BadDescriptor(String),
    #[error("element is not in the enumerated group: {0}")]
    NotInGroup(String),
    #[error("eigenspace splitting did not separate all characters at prime {prime}")]
    SplittingFailure { prime: u64 },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sequence does not converge on the ball (spread {spread:.3e} exceeds tolerance {tol:.3e})")]
    NonConvergence { spread: f64, tol: f64 },
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
