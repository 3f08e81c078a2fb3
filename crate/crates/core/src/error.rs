use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: at least 2 required")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown function id {0}; valid ids are 1 and 3..=10")]
    UnknownFunction(usize),

    #[error("evaluation budget exhausted ({max_fes} evaluations)")]
    BudgetExhausted { max_fes: u64 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("backward called before a forward pass was recorded")]
    EmptyTape,

    #[error("non-finite gradient component")]
    NonFiniteGradient,

    #[error("network produced a non-finite output")]
    DecodeOverflow,

    #[error("empty sample")]
    EmptySample,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
