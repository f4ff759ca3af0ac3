//! Corpus ingestion: preprocessing, sentence segmentation, per-word
//! extraction and seed-word filtering.

mod preprocess;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use self::preprocess::{default_rules, parse_rule_config, Preprocessor, PreprocessingRule};
pub use self::store::{
    segment_sentences, CorpusStats, CorpusStore, SeedRejection, SeedWordPolicy, SourceStats,
    DEFAULT_MAX_PER_SOURCE,
};

/// Where a document came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceType {
    Books,
    News,
    Forums,
    Social,
    Wiki,
    Other,
}

impl SourceType {
    pub const ALL: [SourceType; 6] = [
        SourceType::Books,
        SourceType::News,
        SourceType::Forums,
        SourceType::Social,
        SourceType::Wiki,
        SourceType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceType::Books => "books",
            SourceType::News => "news",
            SourceType::Forums => "forums",
            SourceType::Social => "social",
            SourceType::Wiki => "wiki",
            SourceType::Other => "other",
        }
    }

    /// Row label used in the statistics table.
    pub fn label(self) -> &'static str {
        match self {
            SourceType::Books => "Books",
            SourceType::News => "News Sites",
            SourceType::Forums => "Online Forums",
            SourceType::Social => "Social Media",
            SourceType::Wiki => "Wikipedia",
            SourceType::Other => "Other",
        }
    }
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SourceType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown source type {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
    pub source_type: SourceType,
    #[serde(default)]
    pub year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub sentence_id: String,
    pub text: String,
    pub doc_id: String,
    pub source_type: SourceType,
    pub year: Option<i32>,
    pub token_count: usize,
}

impl SentenceRecord {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.text.split_whitespace()
    }

    /// Whether `word` occurs as a standalone token, compared after
    /// [`normalize_token`] on both sides.
    pub fn contains_token(&self, word: &str) -> bool {
        let word = normalize_token(word);
        !word.is_empty() && self.tokens().any(|t| normalize_token(t) == word)
    }
}

/// Lowercases a token and strips leading and trailing characters that are
/// neither letters nor digits, so `"Ako."` and `"ako"` compare equal while
/// `"asong"` and `"aso"` do not.
pub fn normalize_token(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}
