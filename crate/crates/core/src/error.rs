use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("rule {rule:?}: pattern does not compile: {source}")]
    Regex {
        rule: String,
        #[source]
        source: Box<fancy_regex::Error>,
    },

    #[error("rule {rule:?}: pattern failed while matching: {source}")]
    RegexRuntime {
        rule: String,
        #[source]
        source: Box<fancy_regex::Error>,
    },

    #[error("rule config line {line}: {reason}")]
    RuleConfig { line: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector {id:?} has zero norm")]
    ZeroNorm { id: String },

    #[error("vector {id:?} contains a non-finite value")]
    NonFinite { id: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("no vector for id {0:?}")]
    MissingVector(String),

    #[error("malformed embedding file at byte {offset}: {reason}")]
    MalformedEmbeddings { offset: u64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("schema violation at byte {offset} (line {line}, column {column}): {message}")]
    Schema {
        message: String,
        offset: usize,
        line: usize,
        column: usize,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    /// `true` for errors caused by bad inputs (files, configuration, data),
    /// `false` for failures inside the toolkit itself.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Csv(_) | Error::RegexRuntime { .. })
    }
}
