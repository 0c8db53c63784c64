use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what}: need at least {needed} points, found {found}")]
    TooFewPoints {
        what: &'static str,
        needed: usize,
        found: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The studentizing variance of a z-test statistic is exactly zero.
    #[error("degenerate variance: the studentizing variance is zero")]
    DegenerateVariance,

    #[error("singular matrix")]
    SingularMatrix,

    #[error("negative value under square root: {0}")]
    NegativeVariance(f64),

    #[error("{}: line {line}: {message}", path.display())]
    Csv {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("row count mismatch: {} has {left_rows} rows but {} has {right_rows}", left.display(), right.display())]
    RowCountMismatch {
        left: PathBuf,
        left_rows: usize,
        right: PathBuf,
        right_rows: usize,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
