//! Synset induction over the whole sense inventory, and comparison against
//! a reference wordnet with the Jaccard index.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{agglomerative_cosine, MergeStep};
use crate::error::{Error, Result};
use crate::wsi::SenseInventory;

pub const DEFAULT_SYNSET_THRESHOLD: f64 = 0.12;
pub const DEFAULT_OVERSIZE_THRESHOLD: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub synset_id: String,
    /// Ascending sense ids.
    pub sense_ids: Vec<String>,
    /// Distinct lemmas of the member senses, ascending.
    pub lemmas: Vec<String>,
}

impl Synset {
    pub fn lemma_set(&self) -> BTreeSet<String> {
        self.lemmas.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceSynset {
    pub ref_id: String,
    pub lemmas: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynsetInduction {
    pub synsets: Vec<Synset>,
    pub merges: Vec<MergeStep>,
}

/// Clusters every sense embedding in `inventory` with average-linkage
/// cosine distance, merging while the closest pair is within
/// `distance_threshold`. Singletons become one-sense synsets.
pub fn induce_synsets(inventory: &SenseInventory, distance_threshold: f64) -> Result<SynsetInduction> {
    if inventory.is_empty() {
        return Err(Error::EmptyInput("synset induction over an empty inventory"));
    }
    let outcome = agglomerative_cosine(&inventory.sense_embeddings(), distance_threshold)?;
    let synsets = outcome
        .clusters
        .into_iter()
        .enumerate()
        .map(|(i, cluster)| {
            let lemmas: BTreeSet<String> = cluster
                .member_ids
                .iter()
                .map(|id| {
                    inventory
                        .sense(id)
                        .map(|s| s.lemma.clone())
                        .ok_or_else(|| Error::Integrity(format!("unknown sense {id}")))
                })
                .collect::<Result<_>>()?;
            Ok(Synset {
                synset_id: format!("syn{i:05}"),
                sense_ids: cluster.member_ids,
                lemmas: lemmas.into_iter().collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SynsetInduction {
        synsets,
        merges: outcome.merges,
    })
}

/// An exact Jaccard value `intersection / union`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Jaccard {
    pub intersection: usize,
    pub union: usize,
}

impl Jaccard {
    fn reduced(intersection: usize, union: usize) -> Self {
        let g = gcd(intersection, union).max(1);
        Self {
            intersection: intersection / g,
            union: union / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.intersection as f64 / self.union as f64
    }
}

impl Ord for Jaccard {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.intersection as u128 * other.union as u128)
            .cmp(&(other.intersection as u128 * self.union as u128))
    }
}

impl PartialOrd for Jaccard {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Jaccard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.intersection, self.union)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `|A ∩ B| / |A ∪ B|` as an exact fraction.
pub fn jaccard_exact<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<Jaccard> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::EmptyInput("jaccard of two empty sets"));
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    Ok(Jaccard::reduced(intersection, union))
}

pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<f64> {
    jaccard_exact(a, b).map(|j| j.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynsetMatch {
    pub synset_id: String,
    pub best_ref_id: String,
    pub best_jaccard: f64,
    #[serde(skip)]
    pub exact: Jaccard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynsetComparison {
    pub matches: Vec<SynsetMatch>,
    /// Number of induced synsets per exact best-Jaccard value.
    pub distribution: BTreeMap<Jaccard, usize>,
}

/// Scores every induced synset against its best-matching reference synset.
/// Equal scores go to the lexicographically smallest `ref_id`.
pub fn compare_synsets(induced: &[Synset], reference: &[ReferenceSynset]) -> Result<SynsetComparison> {
    if induced.is_empty() {
        return Err(Error::EmptyInput("no induced synsets to compare"));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("no reference synsets"));
    }
    let mut refs: Vec<(&str, BTreeSet<&str>)> = reference
        .iter()
        .map(|r| {
            if r.lemmas.is_empty() {
                return Err(Error::Integrity(format!("reference synset {} has no lemmas", r.ref_id)));
            }
            Ok((r.ref_id.as_str(), r.lemmas.iter().map(String::as_str).collect()))
        })
        .collect::<Result<_>>()?;
    refs.sort_by(|a, b| a.0.cmp(b.0));

    let matches = induced
        .par_iter()
        .map(|syn| {
            let lemmas: BTreeSet<&str> = syn.lemmas.iter().map(String::as_str).collect();
            let mut best: Option<(Jaccard, &str)> = None;
            for (ref_id, ref_lemmas) in &refs {
                let j = jaccard_exact(&lemmas, ref_lemmas)?;
                if best.is_none_or(|(bj, _)| j > bj) {
                    best = Some((j, ref_id));
                }
            }
            let (exact, ref_id) = best.expect("reference list is nonempty");
            Ok(SynsetMatch {
                synset_id: syn.synset_id.clone(),
                best_ref_id: ref_id.to_string(),
                best_jaccard: exact.value(),
                exact,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut distribution = BTreeMap::new();
    for m in &matches {
        *distribution.entry(m.exact).or_insert(0) += 1;
    }
    Ok(SynsetComparison {
        matches,
        distribution,
    })
}

impl SynsetComparison {
    /// Plot data: `jaccard,fraction,synset_count`, the first column rounded
    /// to two decimals.
    pub fn write_distribution_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["jaccard", "fraction", "synset_count"])?;
        for (j, count) in &self.distribution {
            w.write_record([format!("{:.2}", j.value()), j.to_string(), count.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    /// `synset_id,best_ref_id,best_jaccard`.
    pub fn write_matches_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["synset_id", "best_ref_id", "best_jaccard"])?;
        for m in &self.matches {
            w.write_record([m.synset_id.clone(), m.best_ref_id.clone(), format!("{:.6}", m.best_jaccard)])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedSynset {
    pub synset_id: String,
    pub lemmas: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    /// Number of synsets per lemma count.
    pub histogram: BTreeMap<usize, usize>,
    /// Synsets with at least the oversize threshold of lemmas, for review.
    pub flagged: Vec<FlaggedSynset>,
}

pub fn synset_size_report(induced: &[Synset], oversize_threshold: usize) -> SizeReport {
    let mut histogram = BTreeMap::new();
    let mut flagged = Vec::new();
    for s in induced {
        *histogram.entry(s.lemmas.len()).or_insert(0) += 1;
        if s.lemmas.len() >= oversize_threshold {
            flagged.push(FlaggedSynset {
                synset_id: s.synset_id.clone(),
                lemmas: s.lemmas.clone(),
            });
        }
    }
    SizeReport { histogram, flagged }
}

impl SizeReport {
    /// `synset_size,synset_count`.
    pub fn write_histogram_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["synset_size", "synset_count"])?;
        for (size, count) in &self.histogram {
            w.write_record([size.to_string(), count.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

pub fn read_reference(path: &Path) -> Result<Vec<ReferenceSynset>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}

pub fn read_synsets(path: &Path) -> Result<Vec<Synset>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}

pub fn write_synsets(synsets: &[Synset], path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(synsets).map_err(|e| Error::json("synsets", e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_merge_log<W: Write>(merges: &[MergeStep], mut out: W) -> Result<()> {
    for m in merges {
        serde_json::to_writer(&mut out, m).map_err(|e| Error::json("merge log", e))?;
        out.write_all(b"\n").map_err(|e| Error::io("<merge log>", e))?;
    }
    Ok(())
}
