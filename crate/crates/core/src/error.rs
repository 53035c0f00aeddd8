use thiserror::Error;

/// Errors raised by the dynamics toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of an operation (unknown point,
    /// non-positive radius, empty set, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A hypothesis of the operation does not hold (map not onto, not
    /// continuous, pseudo-orbit slack too large, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A point does not lie in the image required by an orbit adjacency.
    #[error("adjacency error: {0}")]
    Adjacency(String),
    /// A map or space could not be built from the given data.
    #[error("construction error: {0}")]
    Construction(String),
    /// The operation is not available for this kind of carrier.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An input exceeds a configured size limit.
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    /// A construction produced an object violating its own certificate.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}
