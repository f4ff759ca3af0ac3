use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{similarity_matrix, Cluster, PreferencePolicy, SimilarityMatrix};
use crate::embedding::VectorMap;
use crate::error::{Error, Result};

const PARALLEL_MIN_N: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApParams {
    pub damping: f64,
    pub max_iterations: usize,
    pub convergence_window: usize,
    pub preference: PreferencePolicy,
}

impl Default for ApParams {
    fn default() -> Self {
        Self {
            damping: 0.5,
            max_iterations: 500,
            convergence_window: 30,
            preference: PreferencePolicy::MedianOffDiagonal,
        }
    }
}

impl ApParams {
    pub fn with_damping(damping: f64) -> Self {
        Self {
            damping,
            ..Self::default()
        }
    }

    /// `0.5 <= damping < 1` and `max_iterations >= convergence_window >= 1`.
    pub fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.damping) {
            return Err(Error::InvalidParam(format!(
                "damping {} outside [0.5, 1)",
                self.damping
            )));
        }
        if self.convergence_window < 1 || self.max_iterations < self.convergence_window {
            return Err(Error::InvalidParam(format!(
                "need max_iterations ({}) >= convergence_window ({}) >= 1",
                self.max_iterations, self.convergence_window
            )));
        }
        if let PreferencePolicy::Fixed(p) = self.preference {
            if !p.is_finite() {
                return Err(Error::InvalidParam("preference must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Index-level result of one affinity propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ApOutcome {
    /// Ascending exemplar indices.
    pub exemplars: Vec<usize>,
    /// `labels[i]` is the exemplar index item `i` was assigned to.
    pub labels: Vec<usize>,
    pub iterations: usize,
    /// Stopped because the exemplar set was stable for the convergence window.
    pub converged: bool,
    /// No exemplar emerged and the single-cluster fallback was used.
    pub fallback: bool,
    /// Exemplar count after each iteration.
    pub trace: Vec<usize>,
}

/// Affinity propagation with damped responsibility and availability updates.
///
/// Messages start at zero. Each iteration updates every responsibility from
/// the previous availabilities, then every availability from the new
/// responsibilities; both are blended as `damping * old + (1 - damping) * new`.
/// Exemplars are the `k` with `r(k,k) + a(k,k) > 0`. The run stops once the
/// exemplar set has been identical for `convergence_window` consecutive
/// iterations, or after `max_iterations`.
pub fn affinity_propagation(s: &SimilarityMatrix, params: &ApParams) -> Result<ApOutcome> {
    params.validate()?;
    let n = s.n();
    if n == 1 {
        return Ok(ApOutcome {
            exemplars: vec![0],
            labels: vec![0],
            iterations: 0,
            converged: true,
            fallback: false,
            trace: Vec::new(),
        });
    }

    let damping = params.damping;
    let keep = 1.0 - damping;
    let sv = s.values();
    let mut r = vec![0.0f64; n * n];
    let mut a = vec![0.0f64; n * n];
    let mut colsum = vec![0.0f64; n];
    let parallel = n >= PARALLEL_MIN_N;

    let mut previous: Option<Vec<usize>> = None;
    let mut stable = 0usize;
    let mut exemplars = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut trace = Vec::new();

    for it in 1..=params.max_iterations {
        iterations = it;

        let update_r = |(i, r_row): (usize, &mut [f64])| {
            let s_row = &sv[i * n..(i + 1) * n];
            let a_row = &a[i * n..(i + 1) * n];
            let (mut best, mut best_k, mut second) = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY);
            for k in 0..n {
                let v = a_row[k] + s_row[k];
                if v > best {
                    second = best;
                    best = v;
                    best_k = k;
                } else if v > second {
                    second = v;
                }
            }
            for k in 0..n {
                let competitor = if k == best_k { second } else { best };
                r_row[k] = damping * r_row[k] + keep * (s_row[k] - competitor);
            }
        };
        if parallel {
            r.par_chunks_mut(n).enumerate().for_each(update_r);
        } else {
            r.chunks_mut(n).enumerate().for_each(update_r);
        }

        // colsum[k] = sum over i != k of max(0, r(i,k)), accumulated in row order
        colsum.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n {
            let r_row = &r[i * n..(i + 1) * n];
            for (k, c) in colsum.iter_mut().enumerate() {
                if k != i {
                    *c += r_row[k].max(0.0);
                }
            }
        }

        let update_a = |(i, a_row): (usize, &mut [f64])| {
            let r_row = &r[i * n..(i + 1) * n];
            for k in 0..n {
                let computed = if k == i {
                    colsum[k]
                } else {
                    (r[k * n + k] + colsum[k] - r_row[k].max(0.0)).min(0.0)
                };
                a_row[k] = damping * a_row[k] + keep * computed;
            }
        };
        if parallel {
            a.par_chunks_mut(n).enumerate().for_each(update_a);
        } else {
            a.chunks_mut(n).enumerate().for_each(update_a);
        }

        exemplars = (0..n).filter(|&k| r[k * n + k] + a[k * n + k] > 0.0).collect();
        trace.push(exemplars.len());
        log::trace!("ap iteration {it}: {} exemplars", exemplars.len());

        if previous.as_ref() == Some(&exemplars) {
            stable += 1;
        } else {
            stable = 1;
        }
        if stable >= params.convergence_window {
            converged = true;
            break;
        }
        previous = Some(exemplars.clone());
    }

    if exemplars.is_empty() {
        let mut best = 0;
        for k in 1..n {
            if r[k * n + k] + a[k * n + k] > r[best * n + best] + a[best * n + best] {
                best = k;
            }
        }
        return Ok(ApOutcome {
            exemplars: vec![best],
            labels: vec![best; n],
            iterations,
            converged,
            fallback: true,
            trace,
        });
    }

    let labels = (0..n)
        .map(|i| {
            if exemplars.binary_search(&i).is_ok() {
                return i;
            }
            let mut best = exemplars[0];
            for &k in &exemplars[1..] {
                if s.get(i, k) > s.get(i, best) {
                    best = k;
                }
            }
            best
        })
        .collect();
    Ok(ApOutcome {
        exemplars,
        labels,
        iterations,
        converged,
        fallback: false,
        trace,
    })
}

/// Runs affinity propagation over `items` and returns one cluster per
/// exemplar, ordered by exemplar id, with ids `c0000`, `c0001`, ...
pub fn cluster_items(items: &VectorMap, params: &ApParams) -> Result<(Vec<Cluster>, ApOutcome)> {
    params.validate()?;
    let s = similarity_matrix(items, params.preference)?;
    let outcome = affinity_propagation(&s, params)?;
    let ids = s.ids();
    let clusters = outcome
        .exemplars
        .iter()
        .enumerate()
        .map(|(c, &k)| {
            let members = outcome
                .labels
                .iter()
                .enumerate()
                .filter(|&(_, &l)| l == k)
                .map(|(i, _)| ids[i].clone())
                .collect();
            Cluster::from_members(format!("c{c:04}"), members, Some(ids[k].clone()), items)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((clusters, outcome))
}
