use thiserror::Error;

/// Errors produced by graph ingestion, partition handling and the optimizers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("empty graph")]
    EmptyGraph,

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("brute-force enumeration refused for n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("infeasible generator spec: {0}")]
    Infeasible(String),

    #[error("internal consistency: {0}")]
    Inconsistent(String),

    #[error("empty gain cache")]
    EmptyCache,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
