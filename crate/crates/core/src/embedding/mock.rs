use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EmbeddingVector;
use crate::corpus::normalize_token;

/// Deterministic unit-norm vector for `text`.
///
/// A ChaCha8 generator is seeded with SHA-256 of `seed` (little endian)
/// followed by the UTF-8 bytes of `text`; components are standard normal
/// draws, then the vector is normalized.
pub fn mock_embed(text: &str, dim: usize, seed: u64) -> EmbeddingVector {
    assert!(dim > 0, "mock embedding dimension must be positive");
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(text.as_bytes());
    let mut rng = ChaCha8Rng::from_seed(hasher.finalize().into());
    loop {
        let values: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return EmbeddingVector::new(values.into_iter().map(|v| v / norm).collect())
                .expect("normal draws are finite");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockMode {
    /// One pseudo-random direction per distinct sentence text.
    #[default]
    WholeText,
    /// Normalized sum of per-token directions, so sentences that share
    /// context words point in similar directions.
    BagOfWords,
}

/// Test substitute for a sentence-embedding model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockEmbedder {
    pub dim: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: MockMode,
}

impl MockEmbedder {
    pub fn new(dim: usize, seed: u64, mode: MockMode) -> Self {
        Self { dim, seed, mode }
    }

    pub fn embed(&self, text: &str) -> EmbeddingVector {
        match self.mode {
            MockMode::WholeText => mock_embed(text, self.dim, self.seed),
            MockMode::BagOfWords => {
                let mut sum = vec![0.0f64; self.dim];
                let mut any = false;
                for token in text.split_whitespace() {
                    let token = normalize_token(token);
                    if token.is_empty() {
                        continue;
                    }
                    any = true;
                    for (s, x) in sum.iter_mut().zip(mock_embed(&token, self.dim, self.seed).values()) {
                        *s += x;
                    }
                }
                let summed = EmbeddingVector::new(sum).expect("finite sum");
                match any.then(|| summed.normalized()) {
                    Some(Ok(v)) => v,
                    _ => mock_embed(text, self.dim, self.seed),
                }
            }
        }
    }
}
