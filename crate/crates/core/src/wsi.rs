//! Word sense induction: three rounds of affinity propagation per seed word.
//!
//! Round one clusters sentence embeddings, purges weak clusters and trims the
//! rest; each surviving cluster's mean becomes a level-1 sense embedding.
//! Rounds two and three cluster the previous level's sense embeddings and
//! trim again. Each final cluster is one induced sense.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{cluster_items, purge, trim, ApParams, Cluster, PreferencePolicy};
use crate::corpus::{CorpusStore, SeedWordPolicy, DEFAULT_MAX_PER_SOURCE};
use crate::embedding::{EmbeddingStore, EmbeddingVector, VectorMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepParams {
    pub damping: f64,
    pub purge_min_size: Option<usize>,
    pub trim_size: Option<usize>,
    #[serde(default)]
    pub preference: PreferencePolicy,
}

impl StepParams {
    fn validate(&self, step: usize) -> Result<()> {
        if !(0.5..1.0).contains(&self.damping) {
            return Err(Error::InvalidParam(format!(
                "step {step}: damping {} outside [0.5, 1)",
                self.damping
            )));
        }
        if self.trim_size == Some(0) {
            return Err(Error::InvalidParam(format!("step {step}: trim_size must be at least 1")));
        }
        Ok(())
    }
}

/// Missing fields take their default values when deserializing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    pub step1: StepParams,
    pub step2: StepParams,
    pub step3: StepParams,
    pub max_iterations: usize,
    pub convergence_window: usize,
    pub max_per_source: usize,
}

/// Preference used by rounds two and three. Those rounds see only a handful
/// of sense embeddings, where a median preference ties with the single
/// cross similarity of a two-item set and always yields one cluster.
pub const MERGE_ROUND_PREFERENCE: f64 = 0.5;

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            step1: StepParams {
                damping: 0.5,
                purge_min_size: Some(5),
                trim_size: Some(5),
                preference: PreferencePolicy::MedianOffDiagonal,
            },
            step2: StepParams {
                damping: 0.8,
                purge_min_size: None,
                trim_size: Some(20),
                preference: PreferencePolicy::Fixed(MERGE_ROUND_PREFERENCE),
            },
            step3: StepParams {
                damping: 0.5,
                purge_min_size: None,
                trim_size: Some(10),
                preference: PreferencePolicy::Fixed(MERGE_ROUND_PREFERENCE),
            },
            max_iterations: ApParams::default().max_iterations,
            convergence_window: ApParams::default().convergence_window,
            max_per_source: DEFAULT_MAX_PER_SOURCE,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        for (i, step) in self.steps().iter().enumerate() {
            step.validate(i + 1)?;
        }
        self.ap_params(&self.step1).validate()?;
        if self.max_per_source == 0 {
            return Err(Error::InvalidParam("max_per_source must be at least 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> [&StepParams; 3] {
        [&self.step1, &self.step2, &self.step3]
    }

    fn ap_params(&self, step: &StepParams) -> ApParams {
        ApParams {
            damping: step.damping,
            max_iterations: self.max_iterations,
            convergence_window: self.convergence_window,
            preference: step.preference,
        }
    }
}

/// Cluster ids, per round, that a final sense was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepProvenance {
    pub step1: Vec<String>,
    pub step2: Vec<String>,
    pub step3: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sense {
    /// `lemma%n`, `n` counting from 1 in induction order.
    pub sense_id: String,
    pub lemma: String,
    pub embedding: EmbeddingVector,
    /// Ascending sentence ids.
    pub example_sentence_ids: Vec<String>,
    pub step_provenance: StepProvenance,
}

/// Number of clusters each round produced for one word.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClusterCounts {
    pub step1_raw: usize,
    pub step1_kept: usize,
    pub step2: usize,
    pub step3: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Induction {
    pub senses: Vec<Sense>,
    pub counts: ClusterCounts,
}

fn run_round(
    items: &VectorMap,
    step: &StepParams,
    params: &PipelineParams,
    prefix: &str,
) -> Result<(Vec<Cluster>, usize)> {
    let (clusters, _) = cluster_items(items, &params.ap_params(step))?;
    let raw = clusters.len();
    let clusters = match step.purge_min_size {
        Some(min) => purge(clusters, min),
        None => clusters,
    };
    clusters
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = match step.trim_size {
                Some(n) => trim(&c, n, items)?,
                None => c,
            };
            c.cluster_id = format!("{prefix}{i:04}");
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()
        .map(|clusters| (clusters, raw))
}

fn centroids(clusters: &[Cluster]) -> VectorMap {
    clusters
        .iter()
        .map(|c| (c.cluster_id.clone(), c.centroid.clone()))
        .collect()
}

/// Induces the senses of `word` from the embeddings of its example sentences.
pub fn induce_senses(word: &str, sentence_embeddings: &VectorMap, params: &PipelineParams) -> Result<Induction> {
    params.validate()?;
    if sentence_embeddings.is_empty() {
        return Err(Error::EmptyInput("sense induction without sentences"));
    }
    let mut counts = ClusterCounts::default();

    let (level1, raw) = run_round(sentence_embeddings, &params.step1, params, "s1-")?;
    counts.step1_raw = raw;
    counts.step1_kept = level1.len();
    if level1.is_empty() {
        return Ok(Induction {
            senses: Vec::new(),
            counts,
        });
    }
    let level1_vectors = centroids(&level1);
    let (level2, _) = run_round(&level1_vectors, &params.step2, params, "s2-")?;
    counts.step2 = level2.len();
    let level2_vectors = centroids(&level2);
    let (level3, _) = run_round(&level2_vectors, &params.step3, params, "s3-")?;
    counts.step3 = level3.len();

    let level1_by_id: BTreeMap<&str, &Cluster> =
        level1.iter().map(|c| (c.cluster_id.as_str(), c)).collect();
    let level2_by_id: BTreeMap<&str, &Cluster> =
        level2.iter().map(|c| (c.cluster_id.as_str(), c)).collect();

    let senses = level3
        .into_iter()
        .enumerate()
        .map(|(i, top)| {
            let mut step1 = BTreeSet::new();
            for l2 in &top.member_ids {
                step1.extend(level2_by_id[l2.as_str()].member_ids.iter().cloned());
            }
            let examples: BTreeSet<String> = step1
                .iter()
                .flat_map(|l1| level1_by_id[l1.as_str()].member_ids.iter().cloned())
                .collect();
            Sense {
                sense_id: format!("{word}%{}", i + 1),
                lemma: word.to_string(),
                embedding: top.centroid,
                example_sentence_ids: examples.into_iter().collect(),
                step_provenance: StepProvenance {
                    step1: step1.into_iter().collect(),
                    step2: top.member_ids,
                    step3: top.cluster_id,
                },
            }
        })
        .collect();
    Ok(Induction { senses, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseInventory {
    pub params: PipelineParams,
    senses: BTreeMap<String, Vec<Sense>>,
}

impl SenseInventory {
    pub fn new(params: PipelineParams) -> Self {
        Self {
            params,
            senses: BTreeMap::new(),
        }
    }

    /// Adds a lemma's senses. Empty sense lists and duplicate ids are refused.
    pub fn insert(&mut self, lemma: &str, senses: Vec<Sense>) -> Result<()> {
        if senses.is_empty() {
            return Err(Error::EmptyInput("lemma without senses"));
        }
        if self.senses.contains_key(lemma) {
            return Err(Error::DuplicateId(lemma.to_string()));
        }
        let mut seen: BTreeSet<&str> = self.iter().map(|s| s.sense_id.as_str()).collect();
        for s in &senses {
            if s.lemma != lemma {
                return Err(Error::Integrity(format!(
                    "sense {} has lemma {:?}, expected {lemma:?}",
                    s.sense_id, s.lemma
                )));
            }
            if !seen.insert(&s.sense_id) {
                return Err(Error::DuplicateId(s.sense_id.clone()));
            }
        }
        self.senses.insert(lemma.to_string(), senses);
        Ok(())
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.senses.keys().map(String::as_str)
    }

    pub fn senses_of(&self, lemma: &str) -> Option<&[Sense]> {
        self.senses.get(lemma).map(Vec::as_slice)
    }

    /// Every sense, by lemma and then induction order.
    pub fn iter(&self) -> impl Iterator<Item = &Sense> {
        self.senses.values().flatten()
    }

    pub fn sense(&self, sense_id: &str) -> Option<&Sense> {
        let (lemma, _) = sense_id.rsplit_once('%')?;
        self.senses_of(lemma)?.iter().find(|s| s.sense_id == sense_id)
    }

    pub fn sense_count(&self) -> usize {
        self.senses.values().map(Vec::len).sum()
    }

    pub fn lemma_count(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn sense_embeddings(&self) -> VectorMap {
        self.iter()
            .map(|s| (s.sense_id.clone(), s.embedding.clone()))
            .collect()
    }

    pub fn embedding_store(&self) -> Result<EmbeddingStore> {
        let mut store = EmbeddingStore::new();
        for s in self.iter() {
            store.insert(&s.sense_id, &s.embedding)?;
        }
        Ok(store)
    }

    /// Writes the inventory JSON with embeddings in a sibling `EMB1` file
    /// named `embedding_file`, resolved next to `path`.
    pub fn write_files(&self, path: &Path, embedding_file: &str) -> Result<()> {
        let doc = InventoryDocument {
            params: self.params.clone(),
            embedding_file: embedding_file.to_string(),
            senses: self
                .iter()
                .map(|s| InventoryEntry {
                    sense_id: s.sense_id.clone(),
                    lemma: s.lemma.clone(),
                    embedding_ref: s.sense_id.clone(),
                    example_sentence_ids: s.example_sentence_ids.clone(),
                    step_provenance: s.step_provenance.clone(),
                })
                .collect(),
        };
        let sidecar = sibling(path, embedding_file);
        if !self.is_empty() {
            self.embedding_store()?.write_binary_file(&sidecar)?;
        } else if sidecar.exists() {
            std::fs::remove_file(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        }
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::json("inventory", e))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_files(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: InventoryDocument =
            serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
        let store = if doc.senses.is_empty() {
            EmbeddingStore::new()
        } else {
            EmbeddingStore::from_file(&sibling(path, &doc.embedding_file))?
        };
        let mut grouped: BTreeMap<String, Vec<Sense>> = BTreeMap::new();
        for entry in doc.senses {
            let embedding = store
                .get(&entry.embedding_ref)
                .ok_or_else(|| Error::MissingVector(entry.embedding_ref.clone()))?;
            grouped.entry(entry.lemma.clone()).or_default().push(Sense {
                sense_id: entry.sense_id,
                lemma: entry.lemma,
                embedding,
                example_sentence_ids: entry.example_sentence_ids,
                step_provenance: entry.step_provenance,
            });
        }
        let mut inventory = Self::new(doc.params);
        for (lemma, senses) in grouped {
            inventory.insert(&lemma, senses)?;
        }
        Ok(inventory)
    }
}

pub(crate) fn sibling(path: &Path, name: &str) -> std::path::PathBuf {
    path.parent().unwrap_or_else(|| Path::new(".")).join(name)
}

#[derive(Serialize, Deserialize)]
struct InventoryDocument {
    params: PipelineParams,
    embedding_file: String,
    senses: Vec<InventoryEntry>,
}

#[derive(Serialize, Deserialize)]
struct InventoryEntry {
    sense_id: String,
    lemma: String,
    embedding_ref: String,
    example_sentence_ids: Vec<String>,
    step_provenance: StepProvenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipEntry {
    pub lemma: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryBuild {
    pub inventory: SenseInventory,
    /// Seed words that passed the policy.
    pub seed_words: Vec<String>,
    /// Candidates that were filtered out or produced no senses, by lemma.
    pub skipped: Vec<SkipEntry>,
    pub counts: BTreeMap<String, ClusterCounts>,
}

impl InventoryBuild {
    /// `"N seed words → M senses"`.
    pub fn summary(&self) -> String {
        format!(
            "{} seed words → {} senses",
            self.seed_words.len(),
            self.inventory.sense_count()
        )
    }

    pub fn write_skip_report<W: Write>(&self, mut out: W) -> Result<()> {
        for entry in &self.skipped {
            serde_json::to_writer(&mut out, entry).map_err(|e| Error::json("skip report", e))?;
            out.write_all(b"\n").map_err(|e| Error::io("<skip report>", e))?;
        }
        Ok(())
    }
}

/// Runs sense induction for every candidate that passes `policy`.
///
/// Words run in parallel on `workers` threads (0 picks the rayon default).
/// Missing embeddings and empty results are recorded as skips; the output is
/// independent of the worker count.
pub fn build_sense_inventory<S: AsRef<str> + Sync>(
    candidates: &[S],
    corpus: &CorpusStore,
    embeddings: &EmbeddingStore,
    params: &PipelineParams,
    policy: &SeedWordPolicy,
    workers: usize,
) -> Result<InventoryBuild> {
    params.validate()?;
    policy.validate()?;
    let mut skipped = Vec::new();
    let unique: BTreeSet<&str> = candidates.iter().map(AsRef::as_ref).collect();
    for word in &unique {
        if let Some(reason) = corpus.seed_rejection(word, policy, params.max_per_source) {
            skipped.push(SkipEntry {
                lemma: word.to_string(),
                reason: reason.to_string(),
            });
        }
    }
    let seed_words = corpus.filter_seed_words(candidates, policy, params.max_per_source);

    let run = |word: &String| -> (String, Result<Induction>) {
        let vectors = corpus
            .extract_sentences(word, params.max_per_source)
            .into_iter()
            .map(|r| {
                embeddings
                    .get(&r.sentence_id)
                    .map(|v| (r.sentence_id.clone(), v))
                    .ok_or_else(|| Error::MissingVector(r.sentence_id.clone()))
            })
            .collect::<Result<VectorMap>>();
        let result = vectors.and_then(|v| induce_senses(word, &v, params));
        (word.clone(), result)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParam(format!("worker pool: {e}")))?;
    let results: Vec<(String, Result<Induction>)> =
        pool.install(|| seed_words.par_iter().map(run).collect());

    let mut inventory = SenseInventory::new(params.clone());
    let mut counts = BTreeMap::new();
    for (word, result) in results {
        match result {
            Ok(induction) => {
                counts.insert(word.clone(), induction.counts);
                if induction.senses.is_empty() {
                    skipped.push(SkipEntry {
                        lemma: word,
                        reason: "no clusters survived purge".into(),
                    });
                } else {
                    inventory.insert(&word, induction.senses)?;
                }
            }
            Err(e @ Error::MissingVector(_)) => skipped.push(SkipEntry {
                lemma: word,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    skipped.sort_by(|a, b| a.lemma.cmp(&b.lemma));
    Ok(InventoryBuild {
        inventory,
        seed_words,
        skipped,
        counts,
    })
}

/// Number of words per sense count.
pub fn sense_distribution(inventory: &SenseInventory) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for lemma in inventory.lemmas() {
        let n = inventory.senses_of(lemma).map_or(0, <[Sense]>::len);
        *hist.entry(n).or_insert(0) += 1;
    }
    hist
}

/// Plot data with columns `senses_per_word,word_count`.
pub fn write_sense_distribution_csv<W: Write>(hist: &BTreeMap<usize, usize>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["senses_per_word", "word_count"])?;
    for (senses, words) in hist {
        w.write_record([senses.to_string(), words.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn write_sense_distribution_file(hist: &BTreeMap<usize, usize>, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sense_distribution_csv(hist, BufWriter::new(file))
}
