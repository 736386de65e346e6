use mcrt::McrtError;
use serde::Serialize;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(McrtError),
}

impl From<McrtError> for CliError {
    fn from(e: McrtError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(McrtError::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Machine-readable error record printed to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                McrtError::Domain(_) | McrtError::Unsolvable(_) | McrtError::Parse(_) => EXIT_DOMAIN,
                McrtError::Resource(_) => EXIT_RESOURCE,
                McrtError::Internal(_) | McrtError::Io(_) => EXIT_OTHER,
            },
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (error, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Core(e) => (e.kind(), e.to_string()),
        };
        ErrorRecord {
            error,
            message,
            exit_code: self.exit_code(),
        }
    }
}
