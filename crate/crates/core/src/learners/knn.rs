use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{argmax, WeightVector};
use crate::error::{Error, Result};

/// Labelled reference rows shared by every k-NN round of one booster.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

/// k-NN whose neighbours vote with per-reference weights.
///
/// The reference rows are not serialized with the hypothesis; the owning
/// ensemble stores them once and reattaches them on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnHypothesis {
    #[serde(skip)]
    pub refs: Arc<ReferenceSet>,
    pub weights: Vec<f64>,
    pub k: usize,
}

impl KnnHypothesis {
    pub fn predict(&self, x: &[f64]) -> usize {
        let neighbours = nearest_references(&self.refs.rows, x, self.k);
        weighted_vote(&neighbours, &self.refs.labels, &self.weights, self.refs.n_classes)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Indices of the `k` references closest to `x`, nearest first; equal
/// distances keep the lower reference index first.
pub fn nearest_references(refs: &[Vec<f64>], x: &[f64], k: usize) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = refs
        .iter()
        .enumerate()
        .map(|(i, r)| (sq_dist(r, x), i))
        .collect();
    let k = k.min(scored.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() {
        scored.select_nth_unstable_by(k, cmp);
        scored.truncate(k);
    }
    scored.sort_by(cmp);
    scored.into_iter().map(|(_, i)| i).collect()
}

/// Class with the largest summed weight among `neighbours`, lowest id on ties.
pub fn weighted_vote(neighbours: &[usize], labels: &[usize], weights: &[f64], n_classes: usize) -> usize {
    let mut votes = vec![0.0; n_classes];
    for &i in neighbours {
        votes[labels[i]] += weights[i];
    }
    argmax(&votes)
}

pub fn knn_predict(
    refs: &[Vec<f64>],
    labels: &[usize],
    ref_weights: &WeightVector,
    x: &[f64],
    k: usize,
) -> Result<usize> {
    if k == 0 || k > refs.len() {
        return Err(Error::arg(format!(
            "k = {k} must lie in 1..={}",
            refs.len()
        )));
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let neighbours = nearest_references(refs, x, k);
    Ok(weighted_vote(&neighbours, labels, ref_weights.as_slice(), n_classes))
}

pub fn train_knn(refs: Arc<ReferenceSet>, w: &WeightVector, k: usize) -> Result<KnnHypothesis> {
    if k == 0 || k > refs.rows.len() {
        return Err(Error::arg(format!(
            "k = {k} must lie in 1..={}",
            refs.rows.len()
        )));
    }
    Ok(KnnHypothesis {
        refs,
        weights: w.as_slice().to_vec(),
        k,
    })
}
