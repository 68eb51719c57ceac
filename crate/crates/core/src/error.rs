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

    #[error("{path}: file is not valid UTF-8")]
    NotUtf8 { path: PathBuf },

    #[error("corpus directory {0} contains no .txt documents")]
    EmptyCorpus(PathBuf),

    #[error("cannot build an index from an empty corpus")]
    EmptyIndex,

    #[error("annotation for document {doc_id} has {found} tokens, document has {expected}")]
    AnnotationLength {
        doc_id: String,
        expected: usize,
        found: usize,
    },

    #[error("annotation for document {doc_id}, line {line}: unknown POS tag {tag:?}")]
    UnknownPosTag {
        doc_id: String,
        line: usize,
        tag: String,
    },

    #[error("annotation for document {doc_id}, line {line}: {message}")]
    MalformedAnnotation {
        doc_id: String,
        line: usize,
        message: String,
    },

    #[error("unknown document id {0:?}")]
    UnknownDocument(String),

    #[error("not enough distinct n-grams for negative sampling: need {needed}, have {available} (short by {})", needed - available)]
    InsufficientNgrams { needed: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("commonness value {0} is outside [0, 1]")]
    CommonnessOutOfRange(f64),

    #[error("index file is corrupt: {0}")]
    CorruptIndex(String),

    #[error("unsupported {what} format version {found} (expected {expected})")]
    FormatVersion {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("non-finite value for feature {feature:?} in example {example}")]
    NonFiniteFeature { feature: String, example: String },

    #[error("training data needs at least one positive and one negative example")]
    SingleClass,

    #[error("feature names do not match the model: expected {expected:?}, got {found:?}")]
    FeatureMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("unknown feature column {0:?}")]
    UnknownFeature(String),

    #[error("precision-recall curve needs at least one positive example")]
    NoPositives,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{0}")]
    Provenance(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
