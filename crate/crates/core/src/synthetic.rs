//! Planted-geometry generators for tests, benchmarks and fixtures.

use crate::embedding::{mock_embed, EmbeddingVector, VectorMap};

/// `k` orthonormal directions in `dim` dimensions (Gram-Schmidt over mock
/// embeddings of `"direction-{i}"`).
pub fn planted_directions(k: usize, dim: usize, seed: u64) -> Vec<EmbeddingVector> {
    assert!(k <= dim, "cannot plant {k} orthogonal directions in {dim} dimensions");
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempt = 0;
    while basis.len() < k {
        let mut v = mock_embed(&format!("direction-{attempt}"), dim, seed).values().to_vec();
        attempt += 1;
        for b in &basis {
            let proj: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
        .into_iter()
        .map(|v| EmbeddingVector::new(v).expect("finite"))
        .collect()
}

/// Unit vector `normalize(direction + noise * u)` where `u` is the mock
/// embedding of `id` with its component along `direction` removed.
pub fn jittered(direction: &EmbeddingVector, id: &str, noise: f64, seed: u64) -> EmbeddingVector {
    let u = mock_embed(id, direction.dim(), seed);
    let along = u.dot(direction);
    let mut perp: Vec<f64> = u
        .values()
        .iter()
        .zip(direction.values())
        .map(|(x, d)| x - along * d)
        .collect();
    let norm = perp.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        perp.iter_mut().for_each(|x| *x /= norm);
    }
    let v: Vec<f64> = direction
        .values()
        .iter()
        .zip(&perp)
        .map(|(d, x)| d + noise * x)
        .collect();
    EmbeddingVector::new(v)
        .and_then(|v| v.normalized())
        .expect("jittered vector is finite and nonzero")
}

/// `per_blob` points around each of `k` planted directions, with ids
/// `{prefix}{blob}:{index:05}`. Point `i` of a blob is jittered by
/// `max_noise * i / (per_blob - 1)`, so every blob has a dense core and a
/// sparser halo rather than a shell of equidistant points.
pub fn planted_blobs(k: usize, per_blob: usize, dim: usize, max_noise: f64, seed: u64, prefix: &str) -> VectorMap {
    let mut out = VectorMap::new();
    let steps = per_blob.saturating_sub(1).max(1) as f64;
    for (b, d) in planted_directions(k, dim, seed).iter().enumerate() {
        for i in 0..per_blob {
            let id = format!("{prefix}{b}:{i:05}");
            let v = jittered(d, &id, max_noise * i as f64 / steps, seed);
            out.insert(id, v);
        }
    }
    out
}
