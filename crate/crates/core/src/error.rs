use thiserror::Error;

/// Errors raised by every layer of the crate.
///
/// Each variant maps onto a stable machine-readable reason code and a
/// process exit code used by the `groupca` binary.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group family mismatch: expected {expected}, got {found}")]
    FamilyMismatch { expected: String, found: String },

    #[error("{what} needs {needed} but the cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }

    /// Machine-readable reason code.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::FamilyMismatch { .. } => "family_mismatch",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Precondition(_) => "precondition",
            Error::Parse(_) => "parse",
            Error::Unsupported(_) => "unsupported",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
        }
    }

    /// Exit code: 2 usage, 3 cap, 4 precondition, 5 parse.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Unsupported(_) => 2,
            Error::CapExceeded { .. } => 3,
            Error::Precondition(_) | Error::FamilyMismatch { .. } => 4,
            Error::Parse(_) | Error::Io(_) => 5,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
