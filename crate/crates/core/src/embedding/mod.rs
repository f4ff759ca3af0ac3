//! Embedding vectors, the keyed embedding store and the mock embedder.
//!
//! Vectors are computed with in `f64` and stored or serialized as `f32`.

mod mock;
mod store;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use self::mock::{mock_embed, MockEmbedder, MockMode};
pub use self::store::{import_embeddings, EmbeddingStore, EMBEDDING_MAGIC};

use crate::error::{Error, Result};

/// Item vectors keyed by id. Iteration order (ascending id) is the index
/// order used by every clustering kernel.
pub type VectorMap = BTreeMap<String, EmbeddingVector>;

/// A nonempty vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("embedding vector"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id: String::new() });
        }
        Ok(Self(values))
    }

    pub fn from_f32(values: &[f32]) -> Result<Self> {
        Self::new(values.iter().map(|&v| f64::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.0.iter().map(|&v| v as f32).collect()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm { id: String::new() });
        }
        Ok(Self(self.0.iter().map(|v| v / n).collect()))
    }
}

impl TryFrom<Vec<f64>> for EmbeddingVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<EmbeddingVector> for Vec<f64> {
    fn from(v: EmbeddingVector) -> Self {
        v.0
    }
}

/// `dot(a, b) / (|a| |b|)`, clamped to `[-1, 1]`.
///
/// The denominator is `sqrt(|a|² |b|²)`, which makes `cos(v, v)` exactly 1.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let na = a.norm_squared();
    let nb = b.norm_squared();
    if na == 0.0 {
        return Err(Error::ZeroNorm { id: "a".into() });
    }
    if nb == 0.0 {
        return Err(Error::ZeroNorm { id: "b".into() });
    }
    Ok((a.dot(b) / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

/// Componentwise arithmetic mean.
pub fn mean_embedding<'a, I>(vectors: I) -> Result<EmbeddingVector>
where
    I: IntoIterator<Item = &'a EmbeddingVector>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::EmptyInput("mean of zero vectors"))?;
    let mut sum = first.0.clone();
    let mut count = 1usize;
    for v in iter {
        if v.dim() != sum.len() {
            return Err(Error::DimensionMismatch {
                expected: sum.len(),
                found: v.dim(),
            });
        }
        for (s, x) in sum.iter_mut().zip(&v.0) {
            *s += x;
        }
        count += 1;
    }
    let n = count as f64;
    Ok(EmbeddingVector(sum.into_iter().map(|s| s / n).collect()))
}
