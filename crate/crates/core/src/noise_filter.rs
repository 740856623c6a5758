//! One-class SVM noise filter with a Gini-ratio choice of the retained
//! fraction.
//!
//! A partition's instances are ranked by their one-class decision value
//! (highest = most inlier-like). For each candidate retained fraction `p`
//! the top `round(p n)` instances form the clean side and the rest the
//! noisy side; the chosen `p` minimizes `gini(clean) / gini(noisy)`.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data_io::{Dataset, Partition};
use crate::error::{Error, Result};
use crate::ocsvm::{train_ocsvm, OcSvmParams};

/// `1 - sum_j p_j^2` over the classes present.
pub fn gini_impurity(labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::arg("gini impurity of an empty label set"));
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; n_classes];
    for &y in labels {
        counts[y] += 1;
    }
    Ok(gini_from_counts(&counts, labels.len()))
}

fn gini_from_counts(counts: &[usize], n: usize) -> f64 {
    let mut sum = 0.0;
    for &c in counts.iter().filter(|&&c| c > 0) {
        let p = c as f64 / n as f64;
        sum += p * p;
    }
    1.0 - sum
}

/// Serializes an infinite ratio as `null`.
mod ratio_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniScanPoint {
    pub p: f64,
    pub gini_clean: f64,
    /// Zero when the noisy side is pure or empty.
    pub gini_noisy: f64,
    /// `gini_clean / gini_noisy`, or infinity when `gini_noisy` is zero.
    #[serde(with = "ratio_serde")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    pub clean_indices: Vec<usize>,
    pub noisy_indices: Vec<usize>,
    pub chosen_p: f64,
    pub scan: Vec<GiniScanPoint>,
    /// Decision value of each partition instance, aligned with the partition's indices.
    pub scores: Vec<f64>,
    pub gini_full: f64,
    pub solver_iterations: usize,
    pub solver_converged: bool,
}

impl FilterResult {
    pub fn chosen_point(&self) -> Option<&GiniScanPoint> {
        self.scan.iter().find(|s| s.p == self.chosen_p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    pub svm: OcSvmParams,
    pub grid: Vec<f64>,
}

/// `{step, 2 step, ...}` strictly inside `(0, 1)`; step 0.05 gives 19 points.
pub fn default_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::arg(format!("grid step must lie in (0, 1), got {step}")));
    }
    let mut grid = Vec::new();
    let mut k = 1u32;
    loop {
        // rounded to 12 decimals so 3 * 0.05 prints as 0.15
        let p = (f64::from(k) * step * 1e12).round() / 1e12;
        if p >= 1.0 - 1e-9 {
            break;
        }
        grid.push(p);
        k += 1;
    }
    Ok(grid)
}

fn clean_size(p: f64, n: usize) -> usize {
    ((p * n as f64).round() as usize).clamp(1, n)
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("split percentage must lie in (0, 1), got {p}")))
    }
}

/// Positions sorted by descending score; equal scores keep the lower key first.
fn rank(scores: &[f64], keys: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(keys[a].cmp(&keys[b])));
    order
}

/// The `round(p n)` highest-scoring indices (at least one) become clean.
/// Both returned lists are in rank order.
pub fn split_by_score(indices: &[usize], scores: &[f64], p: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    check_p(p)?;
    if indices.len() != scores.len() {
        return Err(Error::arg("scores must align with indices"));
    }
    if indices.is_empty() {
        return Err(Error::arg("cannot split an empty index list"));
    }
    let order = rank(scores, indices);
    let cut = clean_size(p, indices.len());
    let clean = order[..cut].iter().map(|&i| indices[i]).collect();
    let noisy = order[cut..].iter().map(|&i| indices[i]).collect();
    Ok((clean, noisy))
}

fn scan_ranked(labels: &[usize], scores: &[f64], keys: &[usize], grid: &[f64]) -> Result<(f64, Vec<GiniScanPoint>)> {
    if grid.is_empty() {
        return Err(Error::arg("split percentage grid is empty"));
    }
    for &p in grid {
        check_p(p)?;
    }
    if labels.len() != scores.len() || labels.is_empty() {
        return Err(Error::arg("labels and scores must be nonempty and aligned"));
    }
    let n = labels.len();
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let order = rank(scores, keys);

    let mut scan = Vec::with_capacity(grid.len());
    for &p in grid {
        let cut = clean_size(p, n);
        let mut clean = vec![0usize; n_classes];
        let mut noisy = vec![0usize; n_classes];
        for &i in &order[..cut] {
            clean[labels[i]] += 1;
        }
        for &i in &order[cut..] {
            noisy[labels[i]] += 1;
        }
        let gini_clean = gini_from_counts(&clean, cut);
        let gini_noisy = if cut < n { gini_from_counts(&noisy, n - cut) } else { 0.0 };
        let ratio = if gini_noisy > 0.0 {
            gini_clean / gini_noisy
        } else {
            f64::INFINITY
        };
        scan.push(GiniScanPoint {
            p,
            gini_clean,
            gini_noisy,
            ratio,
        });
    }

    let mut best = &scan[0];
    for point in &scan[1..] {
        if point.ratio < best.ratio || (point.ratio == best.ratio && point.p > best.p) {
            best = point;
        }
    }
    Ok((best.p, scan))
}

/// Evaluates the Gini ratio at every grid point and returns the argmin.
/// Ties go to the larger `p`; infinite ratios rank after every finite one.
pub fn scan_split_percentage(labels: &[usize], scores: &[f64], grid: &[f64]) -> Result<(f64, Vec<GiniScanPoint>)> {
    let keys: Vec<usize> = (0..labels.len()).collect();
    scan_ranked(labels, scores, &keys, grid)
}

/// Applies an already-chosen score vector to a partition. Exposed so callers
/// holding scores from elsewhere get the same tie handling as the filter.
pub fn filter_with_scores(part: &Partition, labels: &[usize], scores: Vec<f64>, grid: &[f64]) -> Result<FilterResult> {
    let (chosen_p, scan) = scan_ranked(labels, &scores, &part.indices, grid)?;
    let (clean_indices, noisy_indices) = split_by_score(&part.indices, &scores, chosen_p)?;
    Ok(FilterResult {
        clean_indices,
        noisy_indices,
        chosen_p,
        scan,
        scores,
        gini_full: gini_impurity(labels)?,
        solver_iterations: 0,
        solver_converged: true,
    })
}

/// Trains a one-class SVM on the partition's features (labels ignored),
/// scores every instance and splits at the Gini-ratio argmin.
pub fn filter_partition(part: &Partition, data: &Dataset, cfg: &FilterConfig) -> Result<FilterResult> {
    if part.len() < 2 {
        return Err(Error::arg(format!(
            "partition {} has {} instances; filtering needs at least 2",
            part.id,
            part.len()
        )));
    }
    let rows = data.rows_of(&part.indices);
    let fit = train_ocsvm(&rows, &cfg.svm)?;
    let scores = rows
        .iter()
        .map(|r| fit.model.decision_value(r))
        .collect::<Result<Vec<_>>>()?;
    let labels = data.labels_of(&part.indices);
    let mut result = filter_with_scores(part, &labels, scores, &cfg.grid)?;
    result.solver_iterations = fit.iterations;
    result.solver_converged = fit.converged;
    Ok(result)
}

/// CSV with header `p,gini_clean,gini_noisy,ratio`; infinite ratios print as `inf`.
pub fn scan_to_csv(scan: &[GiniScanPoint]) -> String {
    let mut out = String::from("p,gini_clean,gini_noisy,ratio\n");
    for s in scan {
        let ratio = if s.ratio.is_finite() {
            s.ratio.to_string()
        } else {
            "inf".to_string()
        };
        let _ = writeln!(out, "{},{},{},{}", s.p, s.gini_clean, s.gini_noisy, ratio);
    }
    out
}
