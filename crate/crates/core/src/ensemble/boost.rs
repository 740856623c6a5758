//! SAMME boosting over the weak learners.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{
    argmax, default_candidates, nearest_references, train_knn, train_random_tree, train_stump,
    weighted_vote, LearnerParams, ReferenceSet, WeakHypothesis, WeightVector,
};
use crate::seeds::{self, Stream};

/// Error at or below which boosting stops after appending the round.
pub const PERFECT_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub alpha: f64,
    pub hypothesis: WeakHypothesis,
}

/// Boosted classifier of one partition, weighted in the global vote by `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionEnsemble {
    pub partition_id: usize,
    pub n_classes: usize,
    pub beta: f64,
    pub members: Vec<EnsembleMember>,
    /// Reference rows shared by k-NN members.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub references: Option<Arc<ReferenceSet>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub rounds: usize,
    pub learner: LearnerParams,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            rounds: 50,
            learner: LearnerParams::Stump,
        }
    }
}

/// What happened in one boosting round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Distribution the round's learner was trained on.
    pub weights: WeightVector,
    pub error: f64,
    pub alpha: f64,
    pub appended: bool,
}

/// `ln((1 - err) / err) + ln(K - 1)`, with `err` floored at [`PERFECT_ERROR`].
pub fn samme_alpha(error: f64, n_classes: usize) -> f64 {
    let e = error.max(PERFECT_ERROR);
    ((1.0 - e) / e).ln() + ((n_classes - 1) as f64).ln()
}

impl PartitionEnsemble {
    /// `argmax_k sum_t alpha_t [h_t(x) = k]`, lowest class on ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0.0; self.n_classes];
        for m in &self.members {
            votes[m.hypothesis.predict(x)] += m.alpha;
        }
        argmax(&votes)
    }

    /// Sets `beta` to the accuracy on the given holdout and returns it.
    pub fn compute_beta(&mut self, x: &[Vec<f64>], y: &[usize]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::arg("beta needs a nonempty holdout"));
        }
        if x.len() != y.len() {
            return Err(Error::arg("holdout rows and labels differ in length"));
        }
        let correct = x.iter().zip(y).filter(|(xi, &yi)| self.predict(xi) == yi).count();
        self.beta = correct as f64 / x.len() as f64;
        Ok(self.beta)
    }

    /// Ensemble that always answers `class`; used for partitions whose
    /// training side holds a single class.
    pub fn constant(partition_id: usize, n_classes: usize, class: usize) -> Self {
        PartitionEnsemble {
            partition_id,
            n_classes,
            beta: 1.0,
            members: vec![EnsembleMember {
                alpha: 1.0,
                hypothesis: WeakHypothesis::Stump(crate::learners::Stump::constant(class)),
            }],
            references: None,
        }
    }

    pub(crate) fn attach_references(&mut self) {
        if let Some(refs) = &self.references {
            for m in &mut self.members {
                if let WeakHypothesis::Knn(h) = &mut m.hypothesis {
                    h.refs = Arc::clone(refs);
                }
            }
        }
    }
}

pub fn ensemble_predict(e: &PartitionEnsemble, x: &[f64]) -> usize {
    e.predict(x)
}

pub fn compute_beta(e: &mut PartitionEnsemble, x: &[Vec<f64>], y: &[usize]) -> Result<f64> {
    e.compute_beta(x, y)
}

pub fn adaboost_train(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    cfg: &BoostConfig,
    seed: u64,
) -> Result<PartitionEnsemble> {
    adaboost_train_traced(x, y, n_classes, cfg, seed).map(|(e, _)| e)
}

/// SAMME: uniform start; each round fits the learner to the current
/// weights, skips rounds no better than chance (`err >= 1 - 1/K`), and
/// multiplies the weight of every misclassified instance by `exp(alpha)`.
pub fn adaboost_train_traced(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    cfg: &BoostConfig,
    seed: u64,
) -> Result<(PartitionEnsemble, Vec<RoundRecord>)> {
    let n = x.len();
    if cfg.rounds == 0 {
        return Err(Error::arg("boosting needs at least one round"));
    }
    if n < 2 || y.len() != n {
        return Err(Error::arg(format!(
            "boosting needs at least 2 labelled rows, got {n} rows and {} labels",
            y.len()
        )));
    }
    if n_classes < 2 {
        return Err(Error::arg("boosting needs at least 2 classes"));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::arg(format!("label {bad} outside {n_classes} classes")));
    }
    if y.iter().all(|&c| c == y[0]) {
        return Err(Error::arg("boosting needs at least two distinct classes in y"));
    }

    let dim = x[0].len();
    let chance = 1.0 - 1.0 / n_classes as f64;
    let (references, neighbours) = match cfg.learner {
        LearnerParams::Knn { k } => {
            if k == 0 {
                return Err(Error::arg("k-NN needs k >= 1"));
            }
            let refs = Arc::new(ReferenceSet {
                rows: x.to_vec(),
                labels: y.to_vec(),
                n_classes,
            });
            let k = k.min(n);
            let neigh: Vec<Vec<usize>> = x.iter().map(|xi| nearest_references(x, xi, k)).collect();
            (Some(refs), neigh)
        }
        _ => (None, Vec::new()),
    };

    let mut weights = WeightVector::uniform(n);
    let mut members = Vec::new();
    let mut trace = Vec::new();
    for round in 0..cfg.rounds {
        let hypothesis = match cfg.learner {
            LearnerParams::Stump => WeakHypothesis::Stump(train_stump(x, y, &weights, n_classes)),
            LearnerParams::RandomTree {
                max_depth,
                k_candidates,
            } => WeakHypothesis::RandomTree(train_random_tree(
                x,
                y,
                &weights,
                n_classes,
                max_depth,
                k_candidates.unwrap_or_else(|| default_candidates(dim)),
                seeds::sub_seed(seed, Stream::Learner, round as u64),
            )),
            LearnerParams::Knn { k } => WeakHypothesis::Knn(train_knn(
                Arc::clone(references.as_ref().expect("k-NN references")),
                &weights,
                k.min(n),
            )?),
        };
        let wrong: Vec<bool> = match &hypothesis {
            WeakHypothesis::Knn(h) => neighbours
                .iter()
                .zip(y)
                .map(|(nb, &yi)| weighted_vote(nb, y, &h.weights, n_classes) != yi)
                .collect(),
            h => x.iter().zip(y).map(|(xi, &yi)| h.predict(xi) != yi).collect(),
        };
        let error: f64 = wrong
            .iter()
            .zip(weights.as_slice())
            .filter(|(&bad, _)| bad)
            .map(|(_, &w)| w)
            .sum();

        if error >= chance {
            trace.push(RoundRecord {
                round,
                weights: weights.clone(),
                error,
                alpha: 0.0,
                appended: false,
            });
            continue;
        }
        let alpha = samme_alpha(error, n_classes);
        trace.push(RoundRecord {
            round,
            weights: weights.clone(),
            error,
            alpha,
            appended: true,
        });
        members.push(EnsembleMember { alpha, hypothesis });
        if error <= PERFECT_ERROR {
            break;
        }
        let boost = alpha.exp();
        let raw: Vec<f64> = weights
            .as_slice()
            .iter()
            .zip(&wrong)
            .map(|(&w, &bad)| if bad { w * boost } else { w })
            .collect();
        weights = WeightVector::normalized(raw)?;
    }

    if members.is_empty() {
        return Err(Error::Degenerate(format!(
            "no {} round beat chance ({:.3}) in {} rounds",
            cfg.learner.name(),
            chance,
            cfg.rounds
        )));
    }
    let mut ensemble = PartitionEnsemble {
        partition_id: 0,
        n_classes,
        beta: 0.0,
        members,
        references,
    };
    let correct = x.iter().zip(y).filter(|(xi, &yi)| ensemble.predict(xi) == yi).count();
    ensemble.beta = correct as f64 / n as f64;
    Ok((ensemble, trace))
}
