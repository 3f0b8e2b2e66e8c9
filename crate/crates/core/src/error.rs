use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of bounds: {0}")]
    Bounds(String),
    #[error("arithmetic overflow: {0}")]
    Arithmetic(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Capability(String),
    #[error("work budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse error categories. The CLI maps each to a distinct exit code and the
/// C ABI to a distinct status value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    InvalidParameter,
    Arithmetic,
    Capability,
    Budget,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Bounds(_)
            | Error::Domain(_)
            | Error::Degenerate(_)
            | Error::EmptyDomain(_)
            | Error::Config(_)
            | Error::Parse(_) => ErrorKind::InvalidParameter,
            Error::Arithmetic(_) => ErrorKind::Arithmetic,
            Error::Capability(_) => ErrorKind::Capability,
            Error::Budget(_) => ErrorKind::Budget,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => ErrorKind::Io,
        }
    }
}

impl ErrorKind {
    /// Process exit code used by the CLI. Code 2 is left to argument parsing
    /// (unknown subcommand or flag).
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::InvalidParameter => 3,
            ErrorKind::Budget => 4,
            ErrorKind::Capability => 5,
            ErrorKind::Arithmetic => 6,
            ErrorKind::Io => 7,
        }
    }
}
