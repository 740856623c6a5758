//! Weight-aware weak learners for boosting.

mod knn;
mod stump;
mod tree;

use serde::{Deserialize, Serialize};

pub use knn::{knn_predict, nearest_references, train_knn, weighted_vote, KnnHypothesis, ReferenceSet};
pub use stump::{train_stump, Stump};
pub use tree::{train_random_tree, RandomTree, TreeNode};

use crate::error::{Error, Result};

/// A distribution over training instances: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn uniform(n: usize) -> Self {
        WeightVector(vec![1.0 / n as f64; n])
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::arg("weights must be finite and nonnegative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("weights sum to {sum}, not 1")));
        }
        Ok(WeightVector(weights))
    }

    /// Rescales arbitrary nonnegative masses to sum to one.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::arg("weights must have positive finite total mass"));
        }
        WeightVector::new(raw.into_iter().map(|w| w / sum).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerParams {
    Stump,
    RandomTree {
        max_depth: usize,
        /// `None` means `ceil(sqrt(d))`.
        k_candidates: Option<usize>,
    },
    Knn {
        k: usize,
    },
}

impl LearnerParams {
    pub fn default_tree() -> Self {
        LearnerParams::RandomTree {
            max_depth: 4,
            k_candidates: None,
        }
    }

    pub fn default_knn() -> Self {
        LearnerParams::Knn { k: 5 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerParams::Stump => "stump",
            LearnerParams::RandomTree { .. } => "random_tree",
            LearnerParams::Knn { .. } => "knn",
        }
    }
}

pub fn default_candidates(dim: usize) -> usize {
    ((dim as f64).sqrt().ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeakHypothesis {
    Stump(Stump),
    RandomTree(RandomTree),
    Knn(KnnHypothesis),
}

impl WeakHypothesis {
    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            WeakHypothesis::Stump(s) => s.predict(x),
            WeakHypothesis::RandomTree(t) => t.predict(x),
            WeakHypothesis::Knn(k) => k.predict(x),
        }
    }
}

/// Total weight of the instances `h` gets wrong.
pub fn weighted_error(h: &WeakHypothesis, x: &[Vec<f64>], y: &[usize], w: &WeightVector) -> f64 {
    x.iter()
        .zip(y)
        .zip(w.as_slice())
        .filter(|((xi, &yi), _)| h.predict(xi) != yi)
        .map(|(_, &wi)| wi)
        .sum()
}

/// Per-class weight totals over a subset of instances.
pub(crate) fn class_weights(
    members: impl Iterator<Item = usize>,
    y: &[usize],
    w: &[f64],
    n_classes: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; n_classes];
    for i in members {
        out[y[i]] += w[i];
    }
    out
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (c, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = c;
        }
    }
    best
}
