use std::path::PathBuf;

use thiserror::Error;

use crate::world::ActionSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("discount factor must lie in (0, 1), got {0}")]
    DiscountOutOfRange(f64),

    #[error("drive denominator {0:e} is below the singularity floor")]
    Singular(f64),

    #[error("action {0} is not admissible in the current state")]
    Inadmissible(ActionSpec),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("learning rate must be positive, got {0}")]
    LearningRate(f64),

    #[error("non-finite gradient, update rejected")]
    NonFiniteGradient,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },

    #[error("corrupt network file: {0}")]
    CorruptNet(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(key: &str, msg: impl Into<String>) -> Self {
        Error::Invalid {
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
