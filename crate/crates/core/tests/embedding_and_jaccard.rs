mod support;

use std::collections::BTreeSet;

use senseweave_core::embedding::mean_embedding;
use senseweave_core::synset::{jaccard, jaccard_exact};
use senseweave_core::{EmbeddingStore, EmbeddingVector};
use support::*;

fn set(words: &[&str]) -> BTreeSet<String> {
    words.iter().map(|w| w.to_string()).collect()
}

#[test]
fn jaccard_worked_example() {
    let beer_chips = set(&["beer", "chips"]);
    assert!((jaccard(&beer_chips, &set(&["beer", "chips"])).unwrap() - 1.0).abs() <= 1e-9);
    assert!((jaccard(&beer_chips, &set(&["beer", "pizza"])).unwrap() - 1.0 / 3.0).abs() <= 1e-9);
}

#[test]
fn jaccard_is_symmetric_and_bounded() {
    let mut r = rng(3);
    use rand::Rng;
    for _ in 0..500 {
        let a: BTreeSet<u8> = (0..r.gen_range(0..8)).map(|_| r.gen_range(0..10)).collect();
        let b: BTreeSet<u8> = (0..r.gen_range(1..8)).map(|_| r.gen_range(0..10)).collect();
        let ab = jaccard_exact(&a, &b).unwrap();
        assert_eq!(ab, jaccard_exact(&b, &a).unwrap());
        assert!((0.0..=1.0).contains(&ab.value()));
        assert_eq!(ab.value() == 1.0, a == b);
    }
}

#[test]
fn mean_of_five_matches_sum_over_five() {
    let mut r = rng(11);
    for _ in 0..100 {
        let rows: Vec<Vec<f64>> = (0..5).map(|_| unit(&mut r, 8)).collect();
        let vectors: Vec<EmbeddingVector> = rows.iter().map(|v| EmbeddingVector::new(v.clone()).unwrap()).collect();
        let mean = mean_embedding(&vectors).unwrap();
        for d in 0..8 {
            let expected = rows.iter().map(|v| v[d]).sum::<f64>() / 5.0;
            assert!((mean.values()[d] - expected).abs() <= 1e-12);
        }
    }
}

#[test]
fn binary_file_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.emb");
    let mut r = rng(2);
    let mut store = EmbeddingStore::new();
    for i in 0..50 {
        store.insert(&format!("s{i}"), &EmbeddingVector::new(unit(&mut r, 12)).unwrap()).unwrap();
    }
    store.write_binary_file(&path).unwrap();
    let back = EmbeddingStore::from_file(&path).unwrap();
    assert_eq!(back, store);
}
