use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("no resources loaded")]
    NoResources,

    #[error("duplicate resource id `{0}`")]
    DuplicateId(String),

    #[error("sample size {requested} out of range for a table of {available} resources")]
    SampleSize { requested: usize, available: usize },

    #[error("cannot split a table of {0} resources into two halves")]
    TooSmallToSplit(usize),

    #[error("cannot write resource `{id}`: value {value:?} contains a tab or line break")]
    Unwritable { id: String, value: String },

    #[error("parse error at position {position}: {message}")]
    Spec { position: usize, message: String },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("threshold {0} outside the admissible range")]
    Threshold(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("prediction overflow")]
    PredictionOverflow,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("no runtime model for measure `{0}`")]
    MissingModel(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid protocol: {0}")]
    Protocol(String),

    #[error("malformed plan: {0}")]
    Plan(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            message: message.into(),
        }
    }
}
