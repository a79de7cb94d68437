use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("radicand must be a positive non-square integer, got {0}")]
    InvalidRadicand(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("period not found within {0} steps")]
    PeriodTooLong(usize),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("insufficient p-adic precision: {0}")]
    PrecisionError(String),
    #[error("order search exceeded budget of {0}")]
    OrderBudgetExceeded(u64),
    #[error("matrix is not of compact type at p = {0}")]
    NotCompactType(u64),
    #[error("invalid radius {0}")]
    InvalidRadius(String),
    #[error("negative Pell equation x^2 - {0} y^2 = -1 has no solution")]
    NoNegativePell(u64),
    #[error("point outside the natural-extension domain: {0}")]
    OutOfDomain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PeriodTooLong(_)
            | Error::PrecisionError(_)
            | Error::OrderBudgetExceeded(_) => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
