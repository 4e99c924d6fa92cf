use thiserror::Error;

/// Errors produced by this crate. Data-format problems always name the
/// offending source and, where meaningful, the 1-based line number.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A malformed line in an input file.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    /// A file-level problem that is not tied to a single line.
    #[error("{source_name}: {message}")]
    Data {
        source_name: String,
        message: String,
    },

    #[error("{source_name}: {source}")]
    Io {
        source_name: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub fn data(source_name: &str, message: impl Into<String>) -> Self {
        Error::Data {
            source_name: source_name.to_owned(),
            message: message.into(),
        }
    }

    pub fn io(source_name: &str, source: std::io::Error) -> Self {
        Error::Io {
            source_name: source_name.to_owned(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
