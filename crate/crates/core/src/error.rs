use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A block-diagonalization step found less rank than the stream layout needs.
    #[error("rank deficiency for user {user}: observed rank {rank}, need {needed}")]
    RankDeficient {
        user: usize,
        rank: usize,
        needed: usize,
    },

    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A configuration constraint is violated; the message names the inequality.
    #[error("config constraint violated: {0}")]
    Constraint(String),

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("no data to plot")]
    NoData,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that come from the configuration rather than the filesystem.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Constraint(_) | Error::UnknownScheme(_) | Error::InvalidParameter(_)
        )
    }
}
