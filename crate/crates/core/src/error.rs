use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ScsError>;

#[derive(Debug, Error)]
pub enum ScsError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid codec: {0}")]
    InvalidCodec(String),

    #[error("codebook too large to enumerate: {size} codewords (limit {limit})")]
    TooLargeCodebook { size: f64, limit: usize },

    #[error("unsupported tensor rank {0} (at most 4)")]
    UnsupportedRank(usize),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("step search error: {0}")]
    Search(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ScsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ScsError::Io {
            path: path.into(),
            source,
        }
    }
}
