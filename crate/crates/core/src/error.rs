use thiserror::Error;

/// Errors raised by map construction, solvers, walks and experiments.
#[derive(Debug, Error)]
pub enum McrtError {
    /// Input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A linear problem has no unique solution (e.g. a component with no pinned vertex).
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    /// A configured resource cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// An internal consistency check failed.
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl McrtError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        McrtError::Domain(msg.into())
    }

    /// Short machine-readable tag used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            McrtError::Domain(_) => "domain",
            McrtError::Unsolvable(_) => "unsolvable",
            McrtError::Resource(_) => "resource",
            McrtError::Internal(_) => "internal",
            McrtError::Parse(_) => "parse",
            McrtError::Io(_) => "io",
        }
    }
}

impl From<csv::Error> for McrtError {
    fn from(e: csv::Error) -> Self {
        McrtError::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for McrtError {
    fn from(e: serde_json::Error) -> Self {
        McrtError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, McrtError>;
