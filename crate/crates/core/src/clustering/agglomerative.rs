use serde::{Deserialize, Serialize};

use super::Cluster;
use crate::embedding::VectorMap;
use crate::error::{Error, Result};

/// One merge performed by [`agglomerative_cosine`]. Clusters are named by
/// their smallest member id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub step: usize,
    pub left: String,
    pub right: String,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgglomerativeOutcome {
    /// Ordered by smallest member id, ids `g00000`, `g00001`, ...
    pub clusters: Vec<Cluster>,
    pub merges: Vec<MergeStep>,
}

/// Condensed upper-triangle storage for pairwise sums.
struct Triangle {
    n: usize,
    data: Vec<f64>,
}

impl Triangle {
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }
}

/// Average-linkage agglomerative clustering on cosine distance.
///
/// Starts from singletons and repeatedly merges the pair of clusters with the
/// smallest mean cross-pair distance `1 - cos` while that distance is at most
/// `distance_threshold`. Equal distances go to the lexicographically smallest
/// pair of smallest-member ids.
pub fn agglomerative_cosine(items: &VectorMap, distance_threshold: f64) -> Result<AgglomerativeOutcome> {
    if items.is_empty() {
        return Err(Error::EmptyInput("agglomerative clustering over zero items"));
    }
    if !(0.0..=2.0).contains(&distance_threshold) {
        return Err(Error::InvalidParam(format!(
            "distance threshold {distance_threshold} outside [0, 2]"
        )));
    }
    let s = super::similarity_matrix(items, super::PreferencePolicy::Fixed(1.0))?;
    let n = s.n();
    let ids = s.ids();

    // sums[i][j] = sum of pairwise distances between clusters represented by i and j
    let mut sums = Triangle {
        n,
        data: Vec::with_capacity(n * n.saturating_sub(1) / 2),
    };
    for i in 0..n {
        for j in (i + 1)..n {
            sums.data.push(1.0 - s.get(i, j));
        }
    }
    let mut size = vec![1usize; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active = vec![true; n];
    let linkage = |sums: &Triangle, size: &[usize], i: usize, j: usize| {
        sums.get(i, j) / (size[i] * size[j]) as f64
    };

    // nearest[i] = closest active j != i, smallest j on ties
    let find_nearest = |sums: &Triangle, size: &[usize], active: &[bool], i: usize| {
        let mut best: Option<(f64, usize)> = None;
        for j in (0..n).filter(|&j| j != i && active[j]) {
            let d = linkage(sums, size, i, j);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        best
    };
    let mut nearest: Vec<Option<(f64, usize)>> =
        (0..n).map(|i| find_nearest(&sums, &size, &active, i)).collect();

    let mut merges = Vec::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            if let Some((d, j)) = nearest[i] {
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let better = match best {
                    None => true,
                    Some((bd, bl, bh)) => d < bd || (d == bd && (lo, hi) < (bl, bh)),
                };
                if better {
                    best = Some((d, lo, hi));
                }
            }
        }
        let Some((d, keep, gone)) = best else { break };
        if d > distance_threshold {
            break;
        }

        active[gone] = false;
        for k in (0..n).filter(|&k| active[k] && k != keep) {
            let v = sums.get(gone, k);
            sums.add(keep, k, v);
        }
        size[keep] += size[gone];
        let moved = std::mem::take(&mut members[gone]);
        members[keep].extend(moved);
        nearest[gone] = None;
        merges.push(MergeStep {
            step: merges.len() + 1,
            left: ids[keep].clone(),
            right: ids[gone].clone(),
            distance: d,
            size: size[keep],
        });

        nearest[keep] = find_nearest(&sums, &size, &active, keep);
        for k in (0..n).filter(|&k| active[k] && k != keep) {
            match nearest[k] {
                Some((_, j)) if j == keep || j == gone => {
                    nearest[k] = find_nearest(&sums, &size, &active, k);
                }
                Some((nd, j)) => {
                    let dk = linkage(&sums, &size, k, keep);
                    if dk < nd || (dk == nd && keep < j) {
                        nearest[k] = Some((dk, keep));
                    }
                }
                None => nearest[k] = find_nearest(&sums, &size, &active, k),
            }
        }
    }

    let clusters = (0..n)
        .filter(|&i| active[i])
        .enumerate()
        .map(|(c, i)| {
            let member_ids = members[i].iter().map(|&m| ids[m].clone()).collect();
            Cluster::from_members(format!("g{c:05}"), member_ids, None, items)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AgglomerativeOutcome { clusters, merges })
}
