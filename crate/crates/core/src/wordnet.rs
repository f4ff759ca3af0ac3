//! The finished lexical resource: senses, synsets and the parameters that
//! produced them, stored as canonical JSON with an `EMB1` sidecar.
//!
//! See `docs/wordnet-schema.md` for the on-disk layout.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::CorpusStore;
use crate::embedding::{EmbeddingStore, EmbeddingVector};
use crate::error::{Error, Result};
use crate::synset::{synset_size_report, Synset};
use crate::wsi::{sense_distribution, sibling, PipelineParams, Sense, SenseInventory, StepProvenance};

pub const WORDNET_VERSION: &str = "fwn-1";

#[derive(Debug, Clone, PartialEq)]
pub struct WordNetResource {
    pub version: String,
    pub created_at: DateTime<Utc>,
    pub synset_threshold: f64,
    pub inventory: SenseInventory,
    pub synsets: Vec<Synset>,
    /// Digest of the sentence store the senses were induced from.
    pub source_corpus_digest: String,
    /// Top-level fields this version does not know, kept for re-export.
    pub extra: BTreeMap<String, Value>,
}

impl WordNetResource {
    /// Sense embeddings are rounded to `f32` here so that the in-memory
    /// resource equals what a reload of its export yields.
    pub fn new(
        inventory: SenseInventory,
        synsets: Vec<Synset>,
        synset_threshold: f64,
        source_corpus_digest: String,
        created_at: DateTime<Utc>,
    ) -> Result<Self> {
        let mut rounded = SenseInventory::new(inventory.params.clone());
        for lemma in inventory.lemmas() {
            let senses = inventory
                .senses_of(lemma)
                .unwrap_or_default()
                .iter()
                .map(|s| {
                    Ok(Sense {
                        embedding: EmbeddingVector::from_f32(&s.embedding.to_f32())?,
                        ..s.clone()
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rounded.insert(lemma, senses)?;
        }
        let resource = Self {
            version: WORDNET_VERSION.to_string(),
            created_at,
            synset_threshold,
            inventory: rounded,
            synsets,
            source_corpus_digest,
            extra: BTreeMap::new(),
        };
        resource.validate()?;
        Ok(resource)
    }

    pub fn pipeline_params(&self) -> &PipelineParams {
        &self.inventory.params
    }

    /// Referential integrity: unique synset ids, every synset member is a
    /// known sense, synset lemmas match their members, one embedding
    /// dimension throughout.
    pub fn validate(&self) -> Result<()> {
        if self.version != WORDNET_VERSION {
            return Err(Error::Integrity(format!("unsupported version {:?}", self.version)));
        }
        self.inventory.params.validate()?;
        if !(0.0..=2.0).contains(&self.synset_threshold) {
            return Err(Error::Integrity(format!("synset threshold {} outside [0, 2]", self.synset_threshold)));
        }
        let mut dim = None;
        for s in self.inventory.iter() {
            if !s.sense_id.starts_with(&format!("{}%", s.lemma)) {
                return Err(Error::Integrity(format!("sense id {} does not name lemma {}", s.sense_id, s.lemma)));
            }
            if s.example_sentence_ids.is_empty() {
                return Err(Error::Integrity(format!("sense {} has no example sentences", s.sense_id)));
            }
            match dim {
                None => dim = Some(s.embedding.dim()),
                Some(d) if d != s.embedding.dim() => {
                    return Err(Error::DimensionMismatch { expected: d, found: s.embedding.dim() })
                }
                _ => {}
            }
        }
        let mut synset_ids = BTreeSet::new();
        for syn in &self.synsets {
            if !synset_ids.insert(syn.synset_id.as_str()) {
                return Err(Error::DuplicateId(syn.synset_id.clone()));
            }
            if syn.sense_ids.is_empty() {
                return Err(Error::Integrity(format!("synset {} is empty", syn.synset_id)));
            }
            let mut lemmas = BTreeSet::new();
            for id in &syn.sense_ids {
                let sense = self.inventory.sense(id).ok_or_else(|| {
                    Error::Integrity(format!("synset {} references missing sense {id}", syn.synset_id))
                })?;
                lemmas.insert(sense.lemma.as_str());
            }
            if !lemmas.iter().copied().eq(syn.lemmas.iter().map(String::as_str)) {
                return Err(Error::Integrity(format!(
                    "synset {} lemmas do not match its senses",
                    syn.synset_id
                )));
            }
        }
        Ok(())
    }

    /// Checks that every example sentence id exists in `corpus`.
    pub fn validate_against_corpus(&self, corpus: &CorpusStore) -> Result<()> {
        for s in self.inventory.iter() {
            if let Some(id) = s.example_sentence_ids.iter().find(|id| !corpus.contains_sentence(id)) {
                return Err(Error::Integrity(format!("sense {} cites unknown sentence {id}", s.sense_id)));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SenseEntry {
    sense_id: String,
    lemma: String,
    embedding_ref: String,
    example_sentence_ids: Vec<String>,
    step_provenance: StepProvenance,
}

#[derive(Serialize, Deserialize)]
struct Document {
    version: String,
    created_at: DateTime<Utc>,
    pipeline_params: PipelineParams,
    synset_threshold: f64,
    source_corpus_digest: String,
    embedding_file: String,
    senses: Vec<SenseEntry>,
    synsets: Vec<Synset>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

fn embedding_file_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("wordnet");
    format!("{stem}.emb")
}

/// Writes `resource` to `path` as canonical JSON (sorted keys, two-space
/// indent, trailing newline) and its sense vectors to `<stem>.emb` beside
/// it. Returns the total bytes written across both files.
pub fn export_wordnet(resource: &WordNetResource, path: &Path) -> Result<u64> {
    resource.validate()?;
    let embedding_file = embedding_file_name(path);
    let doc = Document {
        version: resource.version.clone(),
        created_at: resource.created_at,
        pipeline_params: resource.inventory.params.clone(),
        synset_threshold: resource.synset_threshold,
        source_corpus_digest: resource.source_corpus_digest.clone(),
        embedding_file: embedding_file.clone(),
        senses: resource
            .inventory
            .iter()
            .map(|s| SenseEntry {
                sense_id: s.sense_id.clone(),
                lemma: s.lemma.clone(),
                embedding_ref: s.sense_id.clone(),
                example_sentence_ids: s.example_sentence_ids.clone(),
                step_provenance: s.step_provenance.clone(),
            })
            .collect(),
        synsets: resource.synsets.clone(),
        extra: resource.extra.clone(),
    };
    // Going through `Value` sorts every object's keys.
    let value = serde_json::to_value(&doc).map_err(|e| Error::json("wordnet", e))?;
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::json("wordnet", e))?;
    text.push('\n');

    let sidecar = sibling(path, &embedding_file);
    let mut written = 0;
    if resource.inventory.is_empty() {
        if sidecar.exists() {
            std::fs::remove_file(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        }
    } else {
        written += resource.inventory.embedding_store()?.write_binary_file(&sidecar)?;
    }
    std::fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    Ok(written + text.len() as u64)
}

/// Offset is the number of bytes the parser consumed before failing.
fn schema_error(text: &str, e: serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column;
    Error::Schema { message: e.to_string(), offset: offset.min(text.len()), line, column }
}

/// Reads and fully validates a resource written by [`export_wordnet`].
pub fn load_wordnet(path: &Path) -> Result<WordNetResource> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: Document = serde_json::from_str(&text).map_err(|e| schema_error(&text, e))?;
    if doc.version != WORDNET_VERSION {
        return Err(Error::Integrity(format!("unsupported version {:?}", doc.version)));
    }
    let store = if doc.senses.is_empty() {
        EmbeddingStore::new()
    } else {
        EmbeddingStore::from_file(&sibling(path, &doc.embedding_file))?
    };
    let mut grouped: BTreeMap<String, Vec<Sense>> = BTreeMap::new();
    let mut order = Vec::new();
    for entry in doc.senses {
        let embedding = store
            .get(&entry.embedding_ref)
            .ok_or_else(|| Error::MissingVector(entry.embedding_ref.clone()))?;
        if !grouped.contains_key(&entry.lemma) {
            order.push(entry.lemma.clone());
        }
        grouped.entry(entry.lemma.clone()).or_default().push(Sense {
            sense_id: entry.sense_id,
            lemma: entry.lemma,
            embedding,
            example_sentence_ids: entry.example_sentence_ids,
            step_provenance: entry.step_provenance,
        });
    }
    let mut inventory = SenseInventory::new(doc.pipeline_params);
    for (lemma, senses) in grouped {
        inventory.insert(&lemma, senses)?;
    }
    let resource = WordNetResource {
        version: doc.version,
        created_at: doc.created_at,
        synset_threshold: doc.synset_threshold,
        inventory,
        synsets: doc.synsets,
        source_corpus_digest: doc.source_corpus_digest,
        extra: doc.extra,
    };
    resource.validate()?;
    Ok(resource)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordNetStats {
    pub sense_count: usize,
    pub synset_count: usize,
    pub lemma_count: usize,
    pub senses_per_word: BTreeMap<usize, usize>,
    pub synset_sizes: BTreeMap<usize, usize>,
}

pub fn wordnet_stats(resource: &WordNetResource) -> WordNetStats {
    WordNetStats {
        sense_count: resource.inventory.sense_count(),
        synset_count: resource.synsets.len(),
        lemma_count: resource.inventory.lemma_count(),
        senses_per_word: sense_distribution(&resource.inventory),
        synset_sizes: synset_size_report(&resource.synsets, usize::MAX).histogram,
    }
}

impl fmt::Display for WordNetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemmas:   {}", self.lemma_count)?;
        writeln!(f, "senses:   {}", self.sense_count)?;
        writeln!(f, "synsets:  {}", self.synset_count)?;
        writeln!(f, "senses per word:")?;
        for (k, v) in &self.senses_per_word {
            writeln!(f, "  {k:>4} {v}")?;
        }
        writeln!(f, "synset sizes (lemmas):")?;
        for (k, v) in &self.synset_sizes {
            writeln!(f, "  {k:>4} {v}")?;
        }
        Ok(())
    }
}
