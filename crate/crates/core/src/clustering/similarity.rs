use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::VectorMap;
use crate::error::{Error, Result};

/// How the diagonal of a similarity matrix is set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferencePolicy {
    /// Median of all off-diagonal similarities (0 for a single item).
    #[default]
    MedianOffDiagonal,
    Fixed(f64),
}

/// Dense row-major cosine similarity matrix. `ids[i]` names row and column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
    preference: f64,
}

impl SimilarityMatrix {
    /// Builds a matrix from explicit off-diagonal values; the diagonal is
    /// overwritten with `preference`.
    pub fn from_dense(ids: Vec<String>, mut values: Vec<f64>, preference: f64) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::EmptyInput("similarity matrix"));
        }
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) || !preference.is_finite() {
            return Err(Error::InvalidParam("similarities must be finite".into()));
        }
        for i in 0..n {
            values[i * n + i] = preference;
        }
        Ok(Self {
            ids,
            values,
            preference,
        })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn preference(&self) -> f64 {
        self.preference
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.n() + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Median of `values`; averages the two middle elements for even lengths.
pub fn median(values: &mut [f64]) -> Option<f64> {
    let m = values.len();
    if m == 0 {
        return None;
    }
    let (_, upper, _) = values.select_nth_unstable_by(m / 2, f64::total_cmp);
    let upper = *upper;
    if m % 2 == 1 {
        return Some(upper);
    }
    let lower = values[..m / 2]
        .iter()
        .copied()
        .max_by(f64::total_cmp)
        .expect("nonempty lower half");
    Some((lower + upper) / 2.0)
}

/// Pairwise cosine similarities of `items` in ascending id order.
pub fn similarity_matrix(items: &VectorMap, policy: PreferencePolicy) -> Result<SimilarityMatrix> {
    if items.is_empty() {
        return Err(Error::EmptyInput("similarity matrix over zero items"));
    }
    let ids: Vec<String> = items.keys().cloned().collect();
    let vectors: Vec<_> = items.values().collect();
    let dim = vectors[0].dim();
    let mut norms = Vec::with_capacity(vectors.len());
    for (id, v) in items {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        let ns = v.norm_squared();
        if ns == 0.0 {
            return Err(Error::ZeroNorm { id: id.clone() });
        }
        norms.push(ns);
    }

    let n = ids.len();
    let mut values = vec![0.0; n * n];
    let fill_row = |(i, row): (usize, &mut [f64])| {
        for (k, cell) in row.iter_mut().enumerate() {
            if i != k {
                *cell = (vectors[i].dot(vectors[k]) / (norms[i] * norms[k]).sqrt()).clamp(-1.0, 1.0);
            }
        }
    };
    if n >= 128 {
        values.par_chunks_mut(n).enumerate().for_each(fill_row);
    } else {
        values.chunks_mut(n).enumerate().for_each(fill_row);
    }

    let preference = match policy {
        PreferencePolicy::Fixed(p) => p,
        PreferencePolicy::MedianOffDiagonal => {
            let mut upper: Vec<f64> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |k| (i, k)))
                .map(|(i, k)| values[i * n + k])
                .collect();
            median(&mut upper).unwrap_or(0.0)
        }
    };
    SimilarityMatrix::from_dense(ids, values, preference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingVector;

    fn items(rows: &[(&str, &[f64])]) -> VectorMap {
        rows.iter()
            .map(|(id, v)| (id.to_string(), EmbeddingVector::new(v.to_vec()).unwrap()))
            .collect()
    }

    #[test]
    fn single_item() {
        let s = similarity_matrix(&items(&[("a", &[1.0, 2.0])]), PreferencePolicy::Fixed(-0.3)).unwrap();
        assert_eq!(s.n(), 1);
        assert_eq!(s.get(0, 0), -0.3);
    }

    #[test]
    fn identical_vectors() {
        let s = similarity_matrix(
            &items(&[("a", &[0.3, 0.4]), ("b", &[0.3, 0.4])]),
            PreferencePolicy::MedianOffDiagonal,
        )
        .unwrap();
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(1, 0), 1.0);
        assert_eq!(s.preference(), 1.0);
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&mut [0.8, 0.2, 0.6, 0.4]), Some(0.5));
        assert_eq!(median(&mut [0.3, 0.1, 0.2]), Some(0.2));
        assert_eq!(median(&mut []), None);
    }

    #[test]
    fn median_preference_over_off_diagonals() {
        // pairwise cosines: ab = 0, ac = 1/sqrt2, bc = 1/sqrt2 -> median 1/sqrt2
        let s = similarity_matrix(
            &items(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0]), ("c", &[1.0, 1.0])]),
            PreferencePolicy::MedianOffDiagonal,
        )
        .unwrap();
        assert!((s.preference() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        for i in 0..3 {
            assert_eq!(s.get(i, i), s.preference());
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let err = similarity_matrix(
            &items(&[("a", &[0.0, 0.0]), ("b", &[1.0, 0.0])]),
            PreferencePolicy::MedianOffDiagonal,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ZeroNorm { ref id } if id == "a"));
    }

    #[test]
    fn parallel_and_serial_rows_agree() {
        let big: VectorMap = (0..150)
            .map(|i| {
                let v = crate::embedding::mock_embed(&i.to_string(), 6, 9);
                (format!("{i:03}"), v)
            })
            .collect();
        let s = similarity_matrix(&big, PreferencePolicy::MedianOffDiagonal).unwrap();
        let vs: Vec<_> = big.values().collect();
        for i in [0, 17, 149] {
            for k in [3, 88, 140] {
                if i != k {
                    let expected = crate::embedding::cosine_similarity(vs[i], vs[k]).unwrap();
                    assert_eq!(s.get(i, k).to_bits(), expected.to_bits());
                }
            }
        }
    }
}
