//! Clustering kernels over cosine geometry.

mod affinity;
mod agglomerative;
mod postprocess;
mod similarity;

use serde::{Deserialize, Serialize};

pub use self::affinity::{affinity_propagation, cluster_items, ApOutcome, ApParams};
pub use self::agglomerative::{agglomerative_cosine, AgglomerativeOutcome, MergeStep};
pub use self::postprocess::{purge, trim};
pub use self::similarity::{median, similarity_matrix, PreferencePolicy, SimilarityMatrix};

use crate::embedding::{mean_embedding, EmbeddingVector, VectorMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub cluster_id: String,
    /// Ascending item ids.
    pub member_ids: Vec<String>,
    pub exemplar_id: Option<String>,
    pub centroid: EmbeddingVector,
}

impl Cluster {
    /// Builds a cluster whose centroid is the mean of the members' vectors.
    pub fn from_members(
        cluster_id: String,
        mut member_ids: Vec<String>,
        exemplar_id: Option<String>,
        vectors: &VectorMap,
    ) -> Result<Self> {
        if member_ids.is_empty() {
            return Err(Error::EmptyInput("cluster without members"));
        }
        member_ids.sort();
        member_ids.dedup();
        let centroid = centroid_of(&member_ids, vectors)?;
        Ok(Self {
            cluster_id,
            member_ids,
            exemplar_id,
            centroid,
        })
    }

    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }
}

pub(crate) fn centroid_of(ids: &[String], vectors: &VectorMap) -> Result<EmbeddingVector> {
    let members = ids
        .iter()
        .map(|id| vectors.get(id).ok_or_else(|| Error::MissingVector(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    mean_embedding(members)
}
