use thiserror::Error;

/// Errors raised by the screening toolkit.
///
/// Each variant belongs to one exit-code family, see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("method {method} is not supported here: {reason}")]
    UnsupportedMethod { method: String, reason: String },

    #[error("sample size {n} is too small (need at least {min})")]
    SampleSize { n: usize, min: usize },

    #[error("all samples are identical; the mean pairwise distance is zero")]
    DegenerateSamples,

    #[error("the response is constant; its centered Gram matrix is zero")]
    DegenerateResponse,

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at row {row}, column {column}: cannot read {value:?} as a number")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("ridge tuning failed: {0}")]
    Tuning(String),

    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error: argument = 2, data = 3, numeric = 4,
    /// tuning = 5, and 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_)
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedMethod { .. } => 2,
            Error::SampleSize { .. }
            | Error::DegenerateSamples
            | Error::DegenerateResponse
            | Error::Data(_)
            | Error::Parse { .. }
            | Error::Csv(_) => 3,
            Error::Numeric(_) => 4,
            Error::Tuning(_) => 5,
            Error::Replication { source, .. } => source.exit_code(),
            Error::Io(_) | Error::Json(_) => 1,
        }
    }

    /// Short category label printed in front of CLI error lines.
    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            2 => "argument",
            3 => "data",
            4 => "numeric",
            5 => "tuning",
            _ => "io",
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
