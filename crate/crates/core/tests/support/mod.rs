//! Reference implementations and fixture builders shared by the
//! integration tests. The oracles use the textbook formulas with plain
//! nested loops and recompute everything each step.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use senseweave_core::{EmbeddingVector, VectorMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `n` unit vectors scattered around `centers` random directions, so that
/// the data has some cluster structure without being degenerate.
pub fn clustered_unit_vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize, centers: usize, spread: f64) -> Vec<Vec<f64>> {
    let cs: Vec<Vec<f64>> = (0..centers).map(|_| unit(rng, dim)).collect();
    (0..n)
        .map(|i| {
            let c = &cs[i % centers];
            let noise = unit(rng, dim);
            let v: Vec<f64> = c.iter().zip(&noise).map(|(a, b)| a + spread * b).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

/// Ids `p00`, `p01`, ... so that id order equals index order.
pub fn to_map(vectors: &[Vec<f64>]) -> VectorMap {
    vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("p{i:02}"), EmbeddingVector::new(v.clone()).unwrap()))
        .collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    (dot / (na * nb).sqrt()).clamp(-1.0, 1.0)
}

pub fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        (values[m / 2 - 1] + values[m / 2]) / 2.0
    }
}

pub struct ApResult {
    pub exemplars: Vec<usize>,
    pub labels: Vec<usize>,
}

/// Affinity propagation with responsibilities and availabilities computed
/// entry by entry from their definitions.
pub fn naive_ap(
    vectors: &[Vec<f64>],
    damping: f64,
    max_iterations: usize,
    window: usize,
    preference: Option<f64>,
) -> ApResult {
    let n = vectors.len();
    if n == 1 {
        return ApResult { exemplars: vec![0], labels: vec![0] };
    }
    let mut s = vec![vec![0.0; n]; n];
    let mut off = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if i != k {
                s[i][k] = cosine(&vectors[i], &vectors[k]);
                if i < k {
                    off.push(s[i][k]);
                }
            }
        }
    }
    let p = preference.unwrap_or_else(|| median_of(off));
    for (i, row) in s.iter_mut().enumerate() {
        row[i] = p;
    }

    let mut r = vec![vec![0.0; n]; n];
    let mut a = vec![vec![0.0; n]; n];
    let mut history: Vec<Vec<usize>> = Vec::new();
    for _ in 0..max_iterations {
        let mut r_new = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let mut m = f64::NEG_INFINITY;
                for kk in 0..n {
                    if kk != k {
                        m = m.max(a[i][kk] + s[i][kk]);
                    }
                }
                r_new[i][k] = s[i][k] - m;
            }
        }
        for i in 0..n {
            for k in 0..n {
                r[i][k] = damping * r[i][k] + (1.0 - damping) * r_new[i][k];
            }
        }
        let mut a_new = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let mut sum = 0.0;
                for ii in 0..n {
                    if ii != i && ii != k {
                        sum += r[ii][k].max(0.0);
                    }
                }
                a_new[i][k] = if i == k { sum } else { (r[k][k] + sum).min(0.0) };
            }
        }
        for i in 0..n {
            for k in 0..n {
                a[i][k] = damping * a[i][k] + (1.0 - damping) * a_new[i][k];
            }
        }
        let ex: Vec<usize> = (0..n).filter(|&k| r[k][k] + a[k][k] > 0.0).collect();
        history.push(ex);
        if history.len() >= window && history[history.len() - window..].iter().all(|e| *e == history[history.len() - 1]) {
            break;
        }
    }
    let exemplars = history.pop().unwrap_or_default();
    if exemplars.is_empty() {
        let mut best = 0;
        for k in 0..n {
            if r[k][k] + a[k][k] > r[best][best] + a[best][best] {
                best = k;
            }
        }
        return ApResult { exemplars: vec![best], labels: vec![best; n] };
    }
    let labels = (0..n)
        .map(|i| {
            if exemplars.contains(&i) {
                return i;
            }
            let mut best = exemplars[0];
            for &k in &exemplars {
                if s[i][k] > s[i][best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    ApResult { exemplars, labels }
}

/// Average-linkage agglomerative clustering on cosine distance that
/// recomputes every cluster-pair linkage from member pairs at each step.
/// Equal linkages go to the pair whose smallest members sort first.
pub fn naive_agglomerative(vectors: &[Vec<f64>], threshold: f64) -> Vec<BTreeSet<usize>> {
    let n = vectors.len();
    let mut clusters: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
    loop {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in (x + 1)..clusters.len() {
                let mut total = 0.0;
                for &i in &clusters[x] {
                    for &j in &clusters[y] {
                        total += 1.0 - cosine(&vectors[i], &vectors[j]);
                    }
                }
                let d = total / (clusters[x].len() * clusters[y].len()) as f64;
                let mx = *clusters[x].first().unwrap();
                let my = *clusters[y].first().unwrap();
                let key = (mx.min(my), mx.max(my));
                let better = match best {
                    None => true,
                    Some((bd, bk, _, _)) => d < bd || (d == bd && key < bk),
                };
                if better {
                    best = Some((d, key, x, y));
                }
            }
        }
        match best {
            Some((d, _, x, y)) if d <= threshold => {
                let other = clusters.remove(y);
                clusters[x].extend(other);
            }
            _ => break,
        }
    }
    clusters.sort();
    clusters
}

/// Partition of indices by label, sorted for comparison.
pub fn partition_of(labels: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut groups: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().insert(i);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

/// Partition expressed over `p{i:02}` ids, converted back to indices.
pub fn partition_of_ids(groups: &[Vec<String>]) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = groups
        .iter()
        .map(|g| g.iter().map(|id| id[1..].parse().unwrap()).collect())
        .collect();
    out.sort();
    out
}
