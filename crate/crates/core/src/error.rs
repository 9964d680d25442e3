use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the extraction pipeline.
#[derive(Debug, Error)]
pub enum ApeError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { path: PathBuf, offset: usize },

    #[error("no metadata entry for corpus file {0}")]
    MissingMetadata(String),

    #[error("duplicate case_id {0} in corpus")]
    DuplicateCase(String),

    #[error("malformed {what}: {message}")]
    Parse { what: String, message: String },

    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },

    #[error("lexicon: {0}")]
    Lexicon(String),

    #[error("training: {0}")]
    Training(String),

    #[error("feature schema mismatch: model expects version {expected} with {expected_dims} dims, got version {got} with {got_dims} dims")]
    SchemaMismatch {
        expected: u32,
        expected_dims: usize,
        got: u32,
        got_dims: usize,
    },

    #[error("fewer decisions than folds: {decisions} decisions, {folds} folds")]
    TooFewDecisions { decisions: usize, folds: usize },

    #[error("{0}")]
    Metric(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl ApeError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ApeError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ApeError>;
