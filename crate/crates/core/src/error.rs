use thiserror::Error;

#[derive(Debug, Error)]
pub enum TampError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size cap exceeded: {what} is {got}, cap {cap}")]
    Size { what: &'static str, got: usize, cap: usize },
    #[error("cost budget exceeded: need {need:.3e}, budget {budget:.3e}")]
    Budget { need: f64, budget: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("iteration diverged at t={t}, coordinate {index}")]
    Divergence { t: usize, index: usize },
    #[error("table too short: need index {need}, have {have}")]
    TableTooShort { need: usize, have: usize },
    #[error("kernel not positive semidefinite: min eigenvalue {min_eig:.3e} at T={t}")]
    NotPsd { min_eig: f64, t: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("two evaluation routes disagree: {a} vs {b}")]
    RouteMismatch { a: f64, b: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TampError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TampError::InvalidInput(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(TampError::Precondition(msg.into()))
}
