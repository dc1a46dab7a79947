use std::fmt;
use std::path::PathBuf;

/// A syntax or content error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Where an input came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source(pub Option<PathBuf>);

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Some(p) => write!(f, "{}", p.display()),
            None => f.write_str("<input>"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{origin}:{error}")]
    Parse { origin: Source, error: ParseError },
    #[error("cannot read {}: {error}", path.display())]
    Read { path: PathBuf, error: std::io::Error },
    #[error("cannot write {}: {error}", path.display())]
    Write { path: PathBuf, error: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] injcert_core::Error),
    #[error("report encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(origin: Source, error: ParseError) -> Self {
        Error::Parse { origin, error }
    }

    /// Process exit code: 64 usage, 65 bad input data, 66 unreadable input,
    /// 70 internal failure or exceeded cap, 73 unwritable output.
    pub fn exit_code(&self) -> i32 {
        use injcert_core::Error as C;
        match self {
            Error::Usage(_) => 64,
            Error::Parse { .. } | Error::Data(_) => 65,
            Error::Core(C::DimensionMismatch { .. } | C::NotSquare { .. } | C::InvalidInput(_)) => 65,
            Error::Read { .. } => 66,
            Error::Core(_) | Error::Json(_) => 70,
            Error::Write { .. } => 73,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
