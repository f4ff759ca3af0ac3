//! Automatic wordnet construction from an unlabeled corpus and per-sentence
//! embedding vectors.
//!
//! The pipeline runs in this order:
//!
//! * [`corpus`] normalizes raw documents with an ordered regex rule table,
//!   segments them into sentences and serves per-word extraction.
//! * [`embedding`] holds fixed-dimension sentence and sense vectors, reads and
//!   writes the `EMB1` binary format, and provides a deterministic mock
//!   embedder.
//! * [`clustering`] contains the numerical kernels: affinity propagation with
//!   damping, purge and trim post-processing, and threshold-stopped
//!   average-linkage agglomerative clustering on cosine distance.
//! * [`wsi`] runs three rounds of affinity propagation per seed word to
//!   produce a sense inventory.
//! * [`synset`] groups the whole inventory into synsets and scores them
//!   against a reference wordnet with the Jaccard index.
//! * [`wsd`] validates induced senses by disambiguating reference sentences.
//! * [`wordnet`] persists the finished resource.

pub mod clustering;
pub mod corpus;
pub mod embedding;
mod error;
pub mod synset;
pub mod synthetic;
pub mod wordnet;
pub mod wsd;
pub mod wsi;

pub use crate::clustering::{ApParams, Cluster, MergeStep, PreferencePolicy, SimilarityMatrix};
pub use crate::corpus::{
    CorpusStats, CorpusStore, Preprocessor, PreprocessingRule, RawDocument, SeedWordPolicy,
    SentenceRecord, SourceType,
};
pub use crate::embedding::{EmbeddingStore, EmbeddingVector, MockEmbedder, MockMode, VectorMap};
pub use crate::error::{Error, Result};
pub use crate::synset::{ReferenceSynset, Synset};
pub use crate::wordnet::WordNetResource;
pub use crate::wsd::{EvaluationRecord, WsdResult};
pub use crate::wsi::{PipelineParams, Sense, SenseInventory, StepParams};
