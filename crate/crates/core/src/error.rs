use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} too large: {value} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("linear map is not invertible (rank {rank} < {n})")]
    NotInvertible { rank: usize, n: usize },

    #[error("invalid S-box: {0}")]
    InvalidSbox(String),

    #[error("polynomial {poly:#x} is not irreducible of degree {m}")]
    NotIrreducible { m: usize, poly: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypotheses not satisfied: {0}")]
    Hypotheses(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn out_of_range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }
}
