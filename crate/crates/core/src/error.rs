use thiserror::Error;

/// Errors raised across the library. Configuration problems are kept
/// separate from domain-precondition failures so the CLI can map them onto
/// distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid corridor: {0}")]
    InvalidCorridor(String),

    #[error("rejection sampler exhausted {tries} proposals with {accepted} acceptances")]
    NoAcceptance { tries: u64, accepted: u64 },

    #[error("quadrature did not converge within {evaluations} evaluations")]
    Quadrature { evaluations: usize },

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
