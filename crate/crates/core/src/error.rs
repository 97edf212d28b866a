use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library. Everything except [`Error::Io`] is a
/// validation failure of some caller-supplied value.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be odd, got {0}")]
    EvenInput(u128),
    #[error("input must be a positive integer")]
    ZeroInput,
    #[error("input {0} exceeds the supported maximum 2^63")]
    InputTooLarge(u128),
    #[error("base {0} is outside [2, 64]")]
    InvalidBase(u32),
    #[error("level l = {0} is outside the supported range 1..=20")]
    LevelOutOfRange(u32),
    #[error("class (k={k}, k'={k_prime}) is outside the supported range")]
    ClassOutOfRange { k: u32, k_prime: u32 },
    #[error("invalid digit string: {0}")]
    InvalidDigits(String),
    #[error("invalid token text: {0}")]
    InvalidTokens(String),
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
    #[error("invalid frontier: {0}")]
    InvalidFrontier(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
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

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
