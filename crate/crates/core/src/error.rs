use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterate of the reconstruction became non-finite.
    #[error("reconstruction diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    /// Every iterate was the zero vector, so no unit-norm estimate exists.
    #[error("reconstruction produced only zero iterates")]
    DegenerateEstimate,

    #[error("SNR undefined for an all-zero reference signal")]
    UndefinedSnr,

    #[error("brute-force oracle is intractable: {0}")]
    Tractability(String),

    #[error("integer overflow in {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
