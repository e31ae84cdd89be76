use thiserror::Error;

pub type Result<T, E = ErgoError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ErgoError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("point of kind `{point}` does not belong to a {system} state space")]
    KindMismatch { system: String, point: String },

    #[error("frame is rank deficient at sample {sample} (vector {vector})")]
    RankDeficient { sample: usize, vector: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("cocycle is undefined at {0}")]
    UndefinedCocycle(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ErgoError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ErgoError::InvalidArgument(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(ErgoError::DimensionMismatch { expected, found })
        }
    }
}
