use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an annotation file could not be read in the declared format.
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    /// A value parsed fine but violates a record invariant or a closed inventory.
    #[error("invalid {what}: {value}")]
    Validation { what: &'static str, value: String },

    /// Any error raised while reading one line of an input file.
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("tree parse error at byte {pos}: {msg}")]
    TreeParse { pos: usize, msg: String },

    #[error("alignment error in sentence {sentence}: {msg}")]
    Alignment { sentence: usize, msg: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(what: &'static str, value: impl Into<String>) -> Self {
        Error::Validation {
            what,
            value: value.into(),
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            e @ (Error::Malformed { .. } | Error::Line { .. }) => e,
            e => Error::Line {
                line,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, unwrapping file and line context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Line { source, .. } | Error::File { source, .. } => source.root(),
            e => e,
        }
    }

    /// Attach a file path to an error raised while reading that file.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
