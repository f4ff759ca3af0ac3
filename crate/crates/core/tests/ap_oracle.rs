mod support;

use rand::Rng;
use senseweave_core::clustering::{affinity_propagation, cluster_items, similarity_matrix};
use senseweave_core::{ApParams, PreferencePolicy};
use support::*;

fn case(seed: u64) -> (Vec<Vec<f64>>, ApParams) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=30);
    let dim = r.gen_range(2..=8);
    let centers = r.gen_range(1..=4);
    let spread = r.gen_range(0.1..0.8);
    let vectors = clustered_unit_vectors(&mut r, n, dim, centers, spread);
    let damping = [0.5, 0.7, 0.9][r.gen_range(0..3)];
    let preference = if r.gen_bool(0.5) {
        PreferencePolicy::MedianOffDiagonal
    } else {
        PreferencePolicy::Fixed(r.gen_range(-0.5..0.9))
    };
    let params = ApParams { damping, max_iterations: 400, convergence_window: 30, preference };
    (vectors, params)
}

fn oracle(vectors: &[Vec<f64>], params: &ApParams) -> ApResult {
    let p = match params.preference {
        PreferencePolicy::Fixed(p) => Some(p),
        PreferencePolicy::MedianOffDiagonal => None,
    };
    naive_ap(vectors, params.damping, params.max_iterations, params.convergence_window, p)
}

#[test]
fn matches_naive_reference_on_random_datasets() {
    let mut multi = 0;
    for seed in 0..20 {
        let (vectors, params) = case(1000 + seed);
        let s = similarity_matrix(&to_map(&vectors), params.preference).unwrap();
        let fast = affinity_propagation(&s, &params).unwrap();
        let slow = oracle(&vectors, &params);
        assert_eq!(fast.exemplars, slow.exemplars, "seed {seed}: exemplars differ");
        assert_eq!(partition_of(&fast.labels), partition_of(&slow.labels), "seed {seed}");
        multi += usize::from(fast.exemplars.len() > 1);
    }
    assert!(multi >= 10, "only {multi} datasets produced more than one cluster");
}

#[test]
fn cluster_items_agrees_with_the_raw_outcome() {
    let (vectors, params) = case(77);
    let (clusters, outcome) = cluster_items(&to_map(&vectors), &params).unwrap();
    let groups: Vec<Vec<String>> = clusters.iter().map(|c| c.member_ids.clone()).collect();
    assert_eq!(partition_of_ids(&groups), partition_of(&outcome.labels));
    for c in &clusters {
        let exemplar = c.exemplar_id.as_ref().unwrap();
        assert!(c.member_ids.contains(exemplar));
    }
}

#[test]
fn identical_runs_are_identical() {
    let (vectors, params) = case(5);
    let s = similarity_matrix(&to_map(&vectors), params.preference).unwrap();
    let a = affinity_propagation(&s, &params).unwrap();
    let b = affinity_propagation(&s, &params).unwrap();
    assert_eq!(a, b);
}
