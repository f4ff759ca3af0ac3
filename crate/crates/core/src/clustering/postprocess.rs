use super::{centroid_of, Cluster};
use crate::embedding::{cosine_similarity, VectorMap};
use crate::error::{Error, Result};

/// Keeps the clusters with at least `min_size` members, in order.
pub fn purge(clusters: Vec<Cluster>, min_size: usize) -> Vec<Cluster> {
    clusters.into_iter().filter(|c| c.len() >= min_size).collect()
}

/// Keeps the `n` members nearest to the cluster centroid.
///
/// Members are ranked by descending cosine similarity to the centroid of the
/// current members, ties broken by ascending id. The centroid is recomputed
/// over the survivors and the exemplar is dropped if it did not survive.
pub fn trim(cluster: &Cluster, n: usize, vectors: &VectorMap) -> Result<Cluster> {
    if n == 0 {
        return Err(Error::InvalidParam("trim size must be at least 1".into()));
    }
    let centroid = centroid_of(&cluster.member_ids, vectors)?;
    let mut ranked = cluster
        .member_ids
        .iter()
        .map(|id| {
            let v = vectors.get(id).ok_or_else(|| Error::MissingVector(id.clone()))?;
            Ok((cosine_similarity(v, &centroid)?, id))
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|(sa, ia), (sb, ib)| sb.total_cmp(sa).then_with(|| ia.cmp(ib)));
    ranked.truncate(n);

    let mut member_ids: Vec<String> = ranked.into_iter().map(|(_, id)| id.clone()).collect();
    member_ids.sort();
    let exemplar_id = cluster
        .exemplar_id
        .clone()
        .filter(|e| member_ids.binary_search(e).is_ok());
    let centroid = centroid_of(&member_ids, vectors)?;
    Ok(Cluster {
        cluster_id: cluster.cluster_id.clone(),
        member_ids,
        exemplar_id,
        centroid,
    })
}
