use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(
        "enumeration budget exceeded: {needed} subsets requested but the cap is {cap}; lower n or k"
    )]
    BudgetExceeded { needed: u128, cap: u64 },
    #[error("matrix is identically zero")]
    ZeroMatrix,
    #[error("symmetric eigensolve did not converge")]
    Eigensolve,
    #[error("sampling failed after {attempts} attempts: {reason}")]
    Sampling { attempts: usize, reason: String },
    #[error("system is infeasible: {0}")]
    Infeasible(String),
    #[error("null space is trivial")]
    TrivialKernel,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
