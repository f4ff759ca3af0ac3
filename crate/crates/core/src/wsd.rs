//! Sense validation by word sense disambiguation: a sentence is assigned
//! the induced sense with the highest cosine similarity, provided it
//! reaches the threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{cosine_similarity, EmbeddingStore, EmbeddingVector};
use crate::error::{Error, Result};
use crate::wsi::{Sense, SenseInventory};

pub const DEFAULT_WSD_THRESHOLD: f64 = 0.65;
/// Column label for sentences that no induced sense reached.
pub const UNMATCHED: &str = "XX";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub lemma: String,
    pub ref_sense_id: String,
    pub sentence_text: String,
    pub sentence_embedding_id: String,
}

/// Reads a JSON-lines manifest. Blank lines are ignored.
pub fn read_manifest<R: BufRead>(reader: R, origin: &str) -> Result<Vec<EvaluationRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EvaluationRecord =
            serde_json::from_str(&line).map_err(|e| Error::json(format!("{origin}:{}", i + 1), e))?;
        if record.sentence_text.trim().is_empty() {
            return Err(Error::InvalidParam(format!("{origin}:{}: empty sentence_text", i + 1)));
        }
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsdResult {
    pub chosen_sense_id: Option<String>,
    pub score: f64,
    pub threshold_used: f64,
}

/// Picks the sense with the highest cosine similarity to `sentence`.
/// Equal scores go to the smallest sense id, so the input order of
/// `senses` does not matter.
pub fn disambiguate(sentence: &EmbeddingVector, senses: &[Sense], threshold: f64) -> Result<WsdResult> {
    let mut best: Option<(f64, &str)> = None;
    for sense in senses {
        let score = cosine_similarity(sentence, &sense.embedding)?;
        let better = match best {
            None => true,
            Some((b, id)) => score > b || (score == b && sense.sense_id.as_str() < id),
        };
        if better {
            best = Some((score, &sense.sense_id));
        }
    }
    let (score, id) = best.ok_or(Error::EmptyInput("disambiguation against no senses"))?;
    Ok(WsdResult {
        chosen_sense_id: (score >= threshold).then(|| id.to_string()),
        score,
        threshold_used: threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WsdSkipReason {
    NoInducedSenses,
    MissingEmbedding,
}

impl fmt::Display for WsdSkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NoInducedSenses => "lemma has no induced senses",
            Self::MissingEmbedding => "sentence embedding not found",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsdSkip {
    pub index: usize,
    pub lemma: String,
    pub reason: WsdSkipReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordOutcome {
    pub index: usize,
    pub result: WsdResult,
}

fn run_records(
    records: &[EvaluationRecord],
    inventory: &SenseInventory,
    embeddings: &EmbeddingStore,
    threshold: f64,
) -> Result<(Vec<RecordOutcome>, Vec<WsdSkip>)> {
    let per_record = records
        .par_iter()
        .enumerate()
        .map(|(index, record)| {
            let skip = |reason| Ok(Err(WsdSkip { index, lemma: record.lemma.clone(), reason }));
            let Some(senses) = inventory.senses_of(&record.lemma).filter(|s| !s.is_empty()) else {
                return skip(WsdSkipReason::NoInducedSenses);
            };
            let Some(vector) = embeddings.get(&record.sentence_embedding_id) else {
                return skip(WsdSkipReason::MissingEmbedding);
            };
            Ok(Ok(RecordOutcome { index, result: disambiguate(&vector, senses, threshold)? }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut outcomes = Vec::new();
    let mut skipped = Vec::new();
    for r in per_record {
        match r {
            Ok(o) => outcomes.push(o),
            Err(s) => skipped.push(s),
        }
    }
    Ok((outcomes, skipped))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: usize,
    pub total: usize,
    pub fraction: f64,
    /// Times each evaluated sense was chosen, zero included.
    pub per_sense: BTreeMap<String, usize>,
    pub threshold: f64,
    pub evaluated_records: usize,
    pub skipped: Vec<WsdSkip>,
    /// Mean best score over evaluated records, for recalibrating the threshold.
    pub mean_score: Option<f64>,
}

impl ValidityReport {
    /// "57 out of 187 senses valid (30.48%)".
    pub fn summary(&self) -> String {
        format!("{} out of {} senses valid ({:.2}%)", self.valid, self.total, 100.0 * self.fraction)
    }
}

/// A sense is valid when WSD chose it for at least one record. The senses
/// under evaluation are all induced senses of the lemmas in `records`.
pub fn evaluate_sense_validity(
    records: &[EvaluationRecord],
    inventory: &SenseInventory,
    embeddings: &EmbeddingStore,
    threshold: f64,
) -> Result<ValidityReport> {
    let (outcomes, skipped) = run_records(records, inventory, embeddings, threshold)?;
    let mut per_sense = BTreeMap::new();
    for record in records {
        for sense in inventory.senses_of(&record.lemma).unwrap_or_default() {
            per_sense.entry(sense.sense_id.clone()).or_insert(0);
        }
    }
    let mut score_sum = 0.0;
    for o in &outcomes {
        score_sum += o.result.score;
        if let Some(id) = &o.result.chosen_sense_id {
            *per_sense.get_mut(id).expect("chosen sense is under evaluation") += 1;
        }
    }
    let total = per_sense.len();
    let valid = per_sense.values().filter(|&&c| c > 0).count();
    Ok(ValidityReport {
        valid,
        total,
        fraction: if total == 0 { 0.0 } else { valid as f64 / total as f64 },
        per_sense,
        threshold,
        evaluated_records: outcomes.len(),
        mean_score: (!outcomes.is_empty()).then(|| score_sum / outcomes.len() as f64),
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchMatrix {
    pub lemma: String,
    /// Reference sense ids, ascending.
    pub rows: Vec<String>,
    /// Induced sense ids ascending, then [`UNMATCHED`].
    pub columns: Vec<String>,
    /// Row-major fractions.
    pub cells: Vec<f64>,
}

impl MatchMatrix {
    pub fn get(&self, row: &str, column: &str) -> Option<f64> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        Some(self.cells[r * self.columns.len() + c])
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.columns.len();
        &self.cells[r * w..(r + 1) * w]
    }

    /// Long-form plot data: `ref_sense_id,induced_sense_id,fraction`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["ref_sense_id", "induced_sense_id", "fraction"])?;
        for (r, ref_id) in self.rows.iter().enumerate() {
            for (c, col) in self.columns.iter().enumerate() {
                w.write_record([ref_id.as_str(), col.as_str(), &format!("{:.6}", self.row(r)[c])])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

/// For each reference sense of `lemma`, the fraction of its sentences
/// assigned to each induced sense, with below-threshold sentences under
/// [`UNMATCHED`]. Records for other lemmas and skipped records are ignored.
pub fn sense_match_matrix(
    lemma: &str,
    records: &[EvaluationRecord],
    inventory: &SenseInventory,
    embeddings: &EmbeddingStore,
    threshold: f64,
) -> Result<MatchMatrix> {
    let own: Vec<EvaluationRecord> = records.iter().filter(|r| r.lemma == lemma).cloned().collect();
    let (outcomes, _) = run_records(&own, inventory, embeddings, threshold)?;
    let mut columns: Vec<String> = inventory
        .senses_of(lemma)
        .unwrap_or_default()
        .iter()
        .map(|s| s.sense_id.clone())
        .collect();
    columns.sort();
    columns.push(UNMATCHED.to_string());

    let mut counts: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for o in &outcomes {
        let row = counts
            .entry(own[o.index].ref_sense_id.as_str())
            .or_insert_with(|| vec![0; columns.len()]);
        let c = match &o.result.chosen_sense_id {
            Some(id) => columns.iter().position(|x| x == id).expect("sense of this lemma"),
            None => columns.len() - 1,
        };
        row[c] += 1;
    }
    // Reference senses whose sentences were all skipped keep a row with the
    // whole mass unmatched.
    for r in &own {
        counts.entry(r.ref_sense_id.as_str()).or_insert_with(|| vec![0; columns.len()]);
    }
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (ref_id, row) in counts {
        rows.push(ref_id.to_string());
        let n: usize = row.iter().sum();
        if n == 0 {
            cells.extend(std::iter::repeat_n(0.0, columns.len() - 1));
            cells.push(1.0);
        } else {
            cells.extend(row.iter().map(|&c| c as f64 / n as f64));
        }
    }
    Ok(MatchMatrix { lemma: lemma.to_string(), rows, columns, cells })
}
