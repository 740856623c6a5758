//! Independent reference implementations used as test oracles. Nothing in
//! here calls into the solver or learner code paths it is compared with.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rbf(gamma: f64, x: &[f64], z: &[f64]) -> f64 {
    let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

pub fn gram(points: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|x| points.iter().map(|z| rbf(gamma, x, z)).collect())
        .collect()
}

pub fn dual_objective(gram: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, k) in row.iter().enumerate() {
            total += alpha[i] * alpha[j] * k;
        }
    }
    0.5 * total
}

/// Euclidean projection onto `{0 <= a_i <= upper, sum a_i = 1}` by
/// bisection on the shift `lambda` in `a_i = clip(v_i - lambda, 0, upper)`.
pub fn project_box_simplex(v: &[f64], upper: f64) -> Vec<f64> {
    let mass = |lambda: f64| -> f64 { v.iter().map(|&x| (x - lambda).clamp(0.0, upper)).sum() };
    let mut lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - upper - 1.0;
    let mut hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    v.iter().map(|&x| (x - lambda).clamp(0.0, upper)).collect()
}

/// Projected gradient descent on the one-class dual. The step is `1/L`
/// with `L` the largest absolute row sum of the Gram matrix (an upper bound
/// on its spectral norm). Stops at a fixed point or after `max_iter` steps.
pub fn pgd_oracle(gram: &[Vec<f64>], nu: f64, max_iter: usize) -> Vec<f64> {
    let n = gram.len();
    let upper = 1.0 / (nu * n as f64);
    let lipschitz = gram
        .iter()
        .map(|r| r.iter().map(|k| k.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let mut alpha = project_box_simplex(&vec![1.0 / n as f64; n], upper);
    for _ in 0..max_iter {
        let grad: Vec<f64> = gram
            .iter()
            .map(|row| row.iter().zip(&alpha).map(|(k, a)| k * a).sum())
            .collect();
        let moved: Vec<f64> = alpha.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
        let next = project_box_simplex(&moved, upper);
        let change = next
            .iter()
            .zip(&alpha)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        alpha = next;
        if change < 1e-15 {
            break;
        }
    }
    alpha
}

pub fn gaussian_2d(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            vec![
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            ]
        })
        .collect()
}

pub fn uniform_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect()
}

/// 90 standard-normal inliers followed by 10 points on the circle of the
/// given radius.
pub fn gaussian_with_ring_outliers(rng: &mut ChaCha8Rng, radius: f64) -> Vec<Vec<f64>> {
    let mut pts = gaussian_2d(rng, 90);
    for k in 0..10 {
        let angle = std::f64::consts::TAU * (k as f64 + rng.random_range(0.0..0.5)) / 10.0;
        pts.push(vec![radius * angle.cos(), radius * angle.sin()]);
    }
    pts
}

pub fn gini_by_counting(labels: &[usize]) -> f64 {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let p = (j - i) as f64 / n;
        sum += p * p;
        i = j;
    }
    1.0 - sum
}

/// `(best_p, ratios)` straight from the definition: rank by counting how
/// many instances beat each one, split, count classes, divide.
pub fn definitional_scan(labels: &[usize], scores: &[f64], grid: &[f64]) -> (f64, Vec<(f64, f64, f64)>) {
    let n = labels.len();
    let beaten_by = |i: usize| (0..n).filter(|&j| scores[j] > scores[i] || (scores[j] == scores[i] && j < i)).count();
    let mut points = Vec::new();
    for &p in grid {
        let keep = ((p * n as f64).round() as usize).clamp(1, n);
        let (mut clean, mut noisy) = (Vec::new(), Vec::new());
        for i in 0..n {
            if beaten_by(i) < keep {
                clean.push(labels[i]);
            } else {
                noisy.push(labels[i]);
            }
        }
        let gc = gini_by_counting(&clean);
        let gn = if noisy.is_empty() { 0.0 } else { gini_by_counting(&noisy) };
        points.push((gc, gn, if gn > 0.0 { gc / gn } else { f64::INFINITY }));
    }
    let mut best = 0;
    for g in 1..grid.len() {
        if points[g].2 <= points[best].2 {
            best = g;
        }
    }
    (grid[best], points)
}
