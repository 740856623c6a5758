use serde::{Deserialize, Serialize};

use super::{argmax, class_weights, WeightVector};

/// One-split classifier: `x[feature] <= threshold` goes left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

impl Stump {
    pub fn constant(class: usize) -> Self {
        Stump {
            feature: 0,
            threshold: 0.0,
            left: class,
            right: class,
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        if self.left == self.right {
            return self.left;
        }
        if x[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

const IMPROVEMENT: f64 = 1e-12;

/// Exhaustive search over every feature and every midpoint between
/// consecutive distinct values; each side predicts its weighted-majority
/// class. Ties keep the lowest feature index, then the lowest threshold.
/// Falls back to the weighted-majority constant when no split helps.
pub fn train_stump(x: &[Vec<f64>], y: &[usize], w: &WeightVector, n_classes: usize) -> Stump {
    let n = x.len();
    let w = w.as_slice();
    let total = class_weights(0..n, y, w, n_classes);
    let total_mass: f64 = total.iter().sum();
    let majority = argmax(&total);
    let mut best = Stump::constant(majority);
    let mut best_err = total_mass - total[majority];
    let dim = x.first().map_or(0, Vec::len);

    let mut order: Vec<usize> = (0..n).collect();
    for f in 0..dim {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = vec![0.0; n_classes];
        for pos in 0..n.saturating_sub(1) {
            let i = order[pos];
            left[y[i]] += w[i];
            let lo = x[i][f];
            let hi = x[order[pos + 1]][f];
            if lo == hi {
                continue;
            }
            let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let (lc, rc) = (argmax(&left), argmax(&right));
            let err = total_mass - left[lc] - right[rc];
            if err < best_err - IMPROVEMENT {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best_err = err;
                best = Stump {
                    feature: f,
                    threshold,
                    left: lc,
                    right: rc,
                };
            }
        }
    }
    best
}
