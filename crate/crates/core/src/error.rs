use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),

    #[error("non-numeric value {value:?} at row {row}, column `{column}`")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("need at least 2 features, found {0}")]
    TooFewFeatures(usize),

    #[error("axis index {index} out of range for {n_features} features")]
    AxisOutOfRange { index: usize, n_features: usize },

    #[error("degenerate view: {0}")]
    DegenerateView(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("expression `{expr}` is not finite at row {row}")]
    NonFinite { expr: String, row: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("fewer points ({points}) than folds ({folds})")]
    TooFewPoints { points: usize, folds: usize },

    #[error("missing measure `{0}`")]
    MissingMeasure(String),

    #[error("regression error: {0}")]
    Regression(String),

    #[error("insufficient views: need {needed}, have {available}")]
    InsufficientViews { needed: usize, available: usize },

    #[error("malformed model file at line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
