mod support;

use rand::Rng;
use senseweave_core::synthetic::{jittered, planted_blobs};
use senseweave_core::wsd::{evaluate_sense_validity, sense_match_matrix, UNMATCHED};
use senseweave_core::wsi::{induce_senses, StepProvenance};
use senseweave_core::{EmbeddingStore, EmbeddingVector, EvaluationRecord, PipelineParams, Sense, SenseInventory};
use support::*;

const THRESHOLDS: [f64; 3] = [0.5, 0.65, 0.8];

fn random_setup(seed: u64) -> (SenseInventory, EmbeddingStore, Vec<EvaluationRecord>) {
    let mut r = rng(seed);
    let dim = r.gen_range(2..=6);
    let mut inventory = SenseInventory::new(PipelineParams::default());
    let lemmas = r.gen_range(1..=4);
    let mut store = EmbeddingStore::new();
    let mut records = Vec::new();
    for l in 0..lemmas {
        let lemma = format!("w{l}");
        let senses: Vec<Sense> = (1..=r.gen_range(1..=4))
            .map(|n| Sense {
                sense_id: format!("{lemma}%{n}"),
                lemma: lemma.clone(),
                embedding: EmbeddingVector::new(unit(&mut r, dim)).unwrap(),
                example_sentence_ids: vec!["d:00000".into()],
                step_provenance: StepProvenance { step1: vec![], step2: vec![], step3: String::new() },
            })
            .collect();
        inventory.insert(&lemma, senses).unwrap();
        for i in 0..r.gen_range(0..12) {
            let id = format!("{lemma}-e{i}");
            store.insert(&id, &EmbeddingVector::new(unit(&mut r, dim)).unwrap()).unwrap();
            records.push(EvaluationRecord {
                lemma: lemma.clone(),
                ref_sense_id: format!("ref{}", r.gen_range(0..3)),
                sentence_text: "pangungusap".into(),
                sentence_embedding_id: id,
            });
        }
    }
    (inventory, store, records)
}

#[test]
fn valid_count_never_rises_with_the_threshold() {
    for seed in 0..200 {
        let (inventory, store, records) = random_setup(seed);
        let counts: Vec<usize> = THRESHOLDS
            .iter()
            .map(|&t| evaluate_sense_validity(&records, &inventory, &store, t).unwrap().valid)
            .collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "seed {seed}: {counts:?}");
    }
}

#[test]
fn match_matrix_rows_are_distributions() {
    for seed in 0..200 {
        let (inventory, store, records) = random_setup(seed);
        for lemma in inventory.lemmas() {
            for &t in &THRESHOLDS {
                let m = sense_match_matrix(lemma, &records, &inventory, &store, t).unwrap();
                assert_eq!(m.columns.last().map(String::as_str), Some(UNMATCHED));
                for r in 0..m.rows.len() {
                    let sum: f64 = m.row(r).iter().sum();
                    assert!((sum - 1.0).abs() <= 1e-9, "seed {seed} {lemma} row {r}: {sum}");
                    assert!(m.row(r).iter().all(|&x| (0.0..=1.0).contains(&x)));
                }
            }
        }
    }
}

#[test]
fn planted_evaluation_validates_every_planted_sense() {
    let params = PipelineParams::default();
    let mut inventory = SenseInventory::new(params.clone());
    let mut store = EmbeddingStore::new();
    let mut records = Vec::new();
    for (w, k) in [("alpha", 1usize), ("beta", 2), ("gamma", 3)] {
        let items = planted_blobs(k, 30, 64, 0.2, 40 + k as u64, w);
        let induced = induce_senses(w, &items, &params).unwrap();
        assert_eq!(induced.senses.len(), k);
        for sense in &induced.senses {
            let reference = format!("ref-{}", sense.sense_id);
            for i in 0..3 {
                let id = format!("{reference}-{i}");
                store.insert(&id, &jittered(&sense.embedding.normalized().unwrap(), &id, 0.1, 9)).unwrap();
                records.push(EvaluationRecord {
                    lemma: w.into(),
                    ref_sense_id: reference.clone(),
                    sentence_text: "planted".into(),
                    sentence_embedding_id: id,
                });
            }
        }
        inventory.insert(w, induced.senses).unwrap();
    }
    let report = evaluate_sense_validity(&records, &inventory, &store, 0.65).unwrap();
    assert_eq!(report.total, 6);
    assert_eq!(report.valid, report.total);
    assert_eq!(report.fraction, 1.0);
    for lemma in ["beta", "gamma"] {
        let m = sense_match_matrix(lemma, &records, &inventory, &store, 0.65).unwrap();
        for (r, ref_id) in m.rows.iter().enumerate() {
            let own = ref_id.strip_prefix("ref-").unwrap();
            assert_eq!(m.get(ref_id, own), Some(1.0));
            assert_eq!(m.row(r).iter().sum::<f64>(), 1.0);
        }
    }
}
