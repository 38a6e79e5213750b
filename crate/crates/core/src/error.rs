use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate journal id `{0}`")]
    DuplicateLabel(String),

    #[error("invalid journal id: {0}")]
    InvalidLabel(String),

    #[error("value outside the transform domain: {0}")]
    Domain(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("index {index} out of range for {len} journals")]
    Index { index: usize, len: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}")]
    Symmetry {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("matrix is not positive semidefinite: eigenvalue {index} = {value:e}")]
    NotPositiveSemidefinite { index: usize, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("graph is not connected: {0}")]
    Component(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(row: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            row,
            column,
            message: message.into(),
        }
    }
}
