//! Seeded synthetic datasets with known structure, for experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data_io::{Dataset, SparseRow};
use crate::error::Result;
use crate::seeds;

/// A dataset together with the ground truth of which rows were planted noise.
#[derive(Debug, Clone)]
pub struct Planted {
    pub data: Dataset,
    pub is_outlier: Vec<bool>,
}

fn class_names(k: usize) -> Vec<String> {
    (0..k).map(|c| c.to_string()).collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// A point at a uniform angle with radius drawn from `[r_lo, r_hi)`.
fn ring_point(rng: &mut ChaCha8Rng, center: [f64; 2], r_lo: f64, r_hi: f64) -> [f64; 2] {
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let r = rng.random_range(r_lo..r_hi);
    [center[0] + r * theta.cos(), center[1] + r * theta.sin()]
}

fn build(points: Vec<([f64; 2], usize, bool)>, k: usize, rng: &mut ChaCha8Rng) -> Result<Planted> {
    let mut points = points;
    points.shuffle(rng);
    let rows = points.iter().map(|(x, _, _)| SparseRow::from_dense(x)).collect();
    let labels = points.iter().map(|&(_, y, _)| y).collect();
    let is_outlier = points.iter().map(|&(_, _, o)| o).collect();
    Ok(Planted {
        data: Dataset::new(rows, labels, class_names(k), 2)?,
        is_outlier,
    })
}

/// One standard-normal blob in 2-D. Inliers are class 0 except for a
/// `minority` share spread over the other classes; the remaining
/// `n - round(inlier_rate n)` rows sit on a ring of radius
/// `[radius, radius + 2)` and carry a label other than 0.
pub fn planted_outliers(
    n: usize,
    inlier_rate: f64,
    n_classes: usize,
    minority: f64,
    radius: f64,
    seed: u64,
) -> Result<Planted> {
    assert!(n_classes >= 2);
    let mut rng = seeds::rng(seed);
    let n_in = (inlier_rate * n as f64).round() as usize;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n_in {
        let x = [normal(&mut rng), normal(&mut rng)];
        let y = if rng.random_bool(minority) {
            rng.random_range(1..n_classes)
        } else {
            0
        };
        points.push((x, y, false));
    }
    for _ in n_in..n {
        let x = ring_point(&mut rng, [0.0, 0.0], radius, radius + 2.0);
        points.push((x, rng.random_range(1..n_classes), true));
    }
    build(points, n_classes, &mut rng)
}

/// Two unit-variance classes centred at `(-sep/2, 0)` and `(sep/2, 0)`.
/// A `noise_rate` share of the rows are replaced by far outliers on a ring
/// of radius `[radius, radius + 2)` around the origin whose label is the
/// opposite of the class nearest to them (geometric and label noise at once).
pub fn noisy_two_class(n: usize, sep: f64, noise_rate: f64, radius: f64, seed: u64) -> Result<Planted> {
    let mut rng = seeds::rng(seed);
    let n_noise = (noise_rate * n as f64).round() as usize;
    let mut points = Vec::with_capacity(n);
    for i in 0..n - n_noise {
        let y = i % 2;
        let cx = if y == 0 { -sep / 2.0 } else { sep / 2.0 };
        points.push(([cx + normal(&mut rng), normal(&mut rng)], y, false));
    }
    for _ in 0..n_noise {
        let x = ring_point(&mut rng, [0.0, 0.0], radius, radius + 2.0);
        let nearest = usize::from(x[0] > 0.0);
        points.push((x, 1 - nearest, true));
    }
    build(points, 2, &mut rng)
}

/// Four corners of the unit square labelled by XOR, repeated `copies` times.
pub fn xor(copies: usize) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..copies {
        for (x, y) in [([0.0, 0.0], 0), ([1.0, 1.0], 0), ([0.0, 1.0], 1), ([1.0, 0.0], 1)] {
            rows.push(SparseRow::from_dense(&x));
            labels.push(y);
        }
    }
    Dataset::new(rows, labels, class_names(2), 2)
}

/// `per_class` rows of each of `n_classes` classes, features uniform on
/// `[0, 1)^dim` and unrelated to the label (a letter-like class histogram).
pub fn uniform_classes(per_class: usize, n_classes: usize, dim: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seeds::rng(seed);
    let mut rows = Vec::with_capacity(per_class * n_classes);
    let mut labels = Vec::with_capacity(per_class * n_classes);
    for c in 0..n_classes {
        for _ in 0..per_class {
            let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            rows.push(SparseRow::from_dense(&x));
            labels.push(c);
        }
    }
    Dataset::new(rows, labels, class_names(n_classes), dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_counts() {
        let p = planted_outliers(100, 0.9, 3, 0.05, 6.0, 1).unwrap();
        assert_eq!(p.is_outlier.iter().filter(|&&o| o).count(), 10);
        for (i, &o) in p.is_outlier.iter().enumerate() {
            let r = p.data.row(i).to_dense();
            let dist = (r[0] * r[0] + r[1] * r[1]).sqrt();
            if o {
                assert!(dist >= 6.0);
                assert_ne!(p.data.labels()[i], 0);
            }
        }
    }

    #[test]
    fn noise_label_opposes_side() {
        let p = noisy_two_class(200, 3.0, 0.1, 6.0, 4).unwrap();
        for (i, &o) in p.is_outlier.iter().enumerate() {
            if o {
                let x = p.data.row(i).get(0);
                assert_eq!(p.data.labels()[i], usize::from(x <= 0.0));
            }
        }
    }

    #[test]
    fn same_seed_same_data() {
        let a = planted_outliers(50, 0.9, 2, 0.1, 5.0, 9).unwrap();
        let b = planted_outliers(50, 0.9, 2, 0.1, 5.0, 9).unwrap();
        assert_eq!(a.data, b.data);
    }
}
