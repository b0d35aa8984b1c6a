use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("data error: {0}")]
    Data(String),

    #[error("row {row}, column {column:?}: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("non-binary response: {0}")]
    NonBinaryResponse(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("structural edit rejected: {0}")]
    StructuralEdit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("model parse error at line {line}: {message}")]
    ModelParse { line: usize, message: String },

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: String, expected: String },

    #[error("manifest error: {0}")]
    Manifest(String),
}

impl Error {
    /// Stable error-code prefix printed by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "E001",
            Error::Csv(_) => "E002",
            Error::Data(_) | Error::Cell { .. } => "E003",
            Error::DegenerateResponse(_) => "E004",
            Error::DegenerateLabels(_) => "E005",
            Error::NonBinaryResponse(_) => "E006",
            Error::InvalidTree(_) => "E007",
            Error::StructuralEdit(_) => "E008",
            Error::InvalidParameter(_) => "E009",
            Error::Numerical(_) => "E010",
            Error::Schema(_) => "E011",
            Error::ModelParse { .. } => "E012",
            Error::ModelVersion { .. } => "E013",
            Error::Manifest(_) => "E014",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
