use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, class_weights, WeightVector};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

/// Randomized decision tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTree {
    pub nodes: Vec<TreeNode>,
    pub depth: usize,
}

impl RandomTree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { class } => return class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

struct Builder<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    w: &'a [f64],
    n_classes: usize,
    max_depth: usize,
    k_candidates: usize,
    rng: R,
    nodes: Vec<TreeNode>,
    depth: usize,
}

fn gini_of(weights: &[f64]) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let sq: f64 = weights.iter().map(|c| (c / total) * (c / total)).sum();
    (total, 1.0 - sq)
}

impl<R: Rng> Builder<'_, R> {
    /// Class weights of a node; all-zero weight falls back to plain counts.
    fn node_weights(&self, members: &[usize]) -> Vec<f64> {
        let cw = class_weights(members.iter().copied(), self.y, self.w, self.n_classes);
        if cw.iter().sum::<f64>() > 0.0 {
            return cw;
        }
        let mut counts = vec![0.0; self.n_classes];
        for &i in members {
            counts[self.y[i]] += 1.0;
        }
        counts
    }

    fn leaf(&mut self, members: &[usize]) -> usize {
        let class = argmax(&self.node_weights(members));
        self.nodes.push(TreeNode::Leaf { class });
        self.nodes.len() - 1
    }

    fn split_score(&self, members: &[usize], feature: usize, threshold: f64, use_counts: bool) -> f64 {
        let mut left = vec![0.0; self.n_classes];
        let mut right = vec![0.0; self.n_classes];
        for &i in members {
            let wi = if use_counts { 1.0 } else { self.w[i] };
            if self.x[i][feature] <= threshold {
                left[self.y[i]] += wi;
            } else {
                right[self.y[i]] += wi;
            }
        }
        let (wl, gl) = gini_of(&left);
        let (wr, gr) = gini_of(&right);
        (wl * gl + wr * gr) / (wl + wr)
    }

    fn grow(&mut self, members: &[usize], depth: usize) -> usize {
        self.depth = self.depth.max(depth);
        let first = self.y[members[0]];
        let pure = members.iter().all(|&i| self.y[i] == first);
        if depth >= self.max_depth || pure || members.len() < 2 {
            return self.leaf(members);
        }
        let dim = self.x[members[0]].len();
        let use_counts = members.iter().map(|&i| self.w[i]).sum::<f64>() <= 0.0;
        let mut best: Option<(f64, usize, f64)> = None;
        for _ in 0..self.k_candidates {
            let feature = self.rng.random_range(0..dim);
            let (lo, hi) = members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = self.x[i][feature];
                (lo.min(v), hi.max(v))
            });
            if lo >= hi {
                continue;
            }
            let threshold = self.rng.random_range(lo..hi);
            let score = self.split_score(members, feature, threshold, use_counts);
            if best.is_none_or(|(s, _, _)| score < s) {
                best = Some((score, feature, threshold));
            }
        }
        let Some((_, feature, threshold)) = best else {
            return self.leaf(members);
        };
        let (left_members, right_members): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&i| self.x[i][feature] <= threshold);

        let at = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { class: 0 });
        let left = self.grow(&left_members, depth + 1);
        let right = self.grow(&right_members, depth + 1);
        self.nodes[at] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }
}

/// Grows a tree where every node tries `k_candidates` random
/// (feature, uniform threshold within the node's range) splits and keeps
/// the one with the lowest weighted Gini impurity of its children.
pub fn train_random_tree(
    x: &[Vec<f64>],
    y: &[usize],
    w: &WeightVector,
    n_classes: usize,
    max_depth: usize,
    k_candidates: usize,
    seed: u64,
) -> RandomTree {
    let mut builder = Builder {
        x,
        y,
        w: w.as_slice(),
        n_classes,
        max_depth: max_depth.max(1),
        k_candidates: k_candidates.max(1),
        rng: seeds::rng(seed),
        nodes: Vec::new(),
        depth: 0,
    };
    if x.is_empty() {
        builder.nodes.push(TreeNode::Leaf { class: 0 });
    } else {
        let all: Vec<usize> = (0..x.len()).collect();
        builder.grow(&all, 0);
    }
    RandomTree {
        nodes: builder.nodes,
        depth: builder.depth,
    }
}
