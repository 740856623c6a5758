use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A feature row stored as sorted `(index, value)` pairs over `dim` columns.
/// Indices are 0-based; absent columns are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseRow {
    pub fn new(dim: usize, indices: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::arg("index and value lists differ in length"));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::arg("sparse indices must be strictly increasing"));
            }
        }
        if let Some(&last) = indices.last() {
            if last as usize >= dim {
                return Err(Error::arg(format!(
                    "feature index {last} out of range for dimension {dim}"
                )));
            }
        }
        Ok(SparseRow {
            dim,
            indices,
            values,
        })
    }

    /// Builds a row from dense values, dropping exact zeros.
    pub fn from_dense(x: &[f64]) -> Self {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (j, &v) in x.iter().enumerate() {
            if v != 0.0 {
                indices.push(j as u32);
                values.push(v);
            }
        }
        SparseRow {
            dim: x.len(),
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&j, &v)| (j as usize, v))
    }

    pub fn get(&self, j: usize) -> f64 {
        match self.indices.binary_search(&(j as u32)) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (j, v) in self.iter() {
            out[j] = v;
        }
        out
    }

    /// Same entries viewed over another dimension; entries past `dim` are dropped.
    pub fn resized(&self, dim: usize) -> Self {
        let keep = self.indices.partition_point(|&j| (j as usize) < dim);
        SparseRow {
            dim,
            indices: self.indices[..keep].to_vec(),
            values: self.values[..keep].to_vec(),
        }
    }

    pub fn dot(&self, other: &SparseRow) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }

    /// Squared Euclidean distance, accumulated term by term over the merged
    /// index lists (no `|x|² + |z|² - 2xz` cancellation).
    pub fn sq_dist(&self, other: &SparseRow) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        loop {
            let ia = self.indices.get(a);
            let ib = other.indices.get(b);
            let diff = match (ia, ib) {
                (None, None) => break,
                (Some(_), None) => {
                    a += 1;
                    self.values[a - 1]
                }
                (None, Some(_)) => {
                    b += 1;
                    other.values[b - 1]
                }
                (Some(i), Some(j)) if i < j => {
                    a += 1;
                    self.values[a - 1]
                }
                (Some(i), Some(j)) if i > j => {
                    b += 1;
                    other.values[b - 1]
                }
                _ => {
                    a += 1;
                    b += 1;
                    self.values[a - 1] - other.values[b - 1]
                }
            };
            sum += diff * diff;
        }
        sum
    }
}

/// Encodes label tokens as class ids in first-appearance order.
#[derive(Debug, Default, Clone)]
pub struct LabelEncoder {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl LabelEncoder {
    pub fn encode(&mut self, token: &str) -> usize {
        if let Some(&id) = self.lookup.get(token) {
            return id;
        }
        let id = self.names.len();
        self.names.push(token.to_string());
        self.lookup.insert(token.to_string(), id);
        id
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}

/// A labelled feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<SparseRow>,
    labels: Vec<usize>,
    label_names: Vec<String>,
    dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub label: String,
    pub count: usize,
}

/// JSON-serializable summary of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub class_histogram: Vec<ClassCount>,
}

impl Dataset {
    pub fn new(
        rows: Vec<SparseRow>,
        labels: Vec<usize>,
        label_names: Vec<String>,
        dim: usize,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::arg(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= label_names.len()) {
            return Err(Error::arg(format!(
                "label id {bad} outside vocabulary of {} classes",
                label_names.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &label_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::arg(format!("duplicate label name {name:?}")));
            }
        }
        if let Some(r) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::arg(format!(
                "row of dimension {} in dataset of dimension {dim}",
                r.dim()
            )));
        }
        Ok(Dataset {
            rows,
            labels,
            label_names,
            dim,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn rows_of(&self, indices: &[usize]) -> Vec<SparseRow> {
        indices.iter().map(|&i| self.rows[i].clone()).collect()
    }

    pub fn dense_rows_of(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        indices.iter().map(|&i| self.rows[i].to_dense()).collect()
    }

    pub fn labels_of(&self, indices: &[usize]) -> Vec<usize> {
        indices.iter().map(|&i| self.labels[i]).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    pub fn stats(&self) -> DatasetStats {
        DatasetStats {
            n: self.n(),
            d: self.dim,
            k: self.n_classes(),
            class_histogram: self
                .label_names
                .iter()
                .zip(self.class_counts())
                .map(|(label, count)| ClassCount {
                    label: label.clone(),
                    count,
                })
                .collect(),
        }
    }

    /// LIBSVM text, one line per row, using 1-based feature indices.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for (row, &y) in self.rows.iter().zip(&self.labels) {
            out.push_str(&self.label_names[y]);
            for (j, v) in row.iter() {
                let _ = write!(out, " {}:{}", j + 1, v);
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_distance_matches_dense() {
        let a = SparseRow::from_dense(&[1.0, 0.0, 3.0, 0.0]);
        let b = SparseRow::from_dense(&[0.0, 2.0, 1.0, 0.0]);
        assert_eq!(a.sq_dist(&b), 1.0 + 4.0 + 4.0);
        assert_eq!(a.dot(&b), 3.0);
        assert_eq!(a.sq_dist(&a), 0.0);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(SparseRow::new(3, vec![1, 1], vec![1.0, 2.0]).is_err());
        assert!(SparseRow::new(3, vec![3], vec![1.0]).is_err());
    }

    #[test]
    fn rejects_duplicate_label_names() {
        let rows = vec![SparseRow::from_dense(&[1.0])];
        let err = Dataset::new(rows, vec![0], vec!["a".into(), "a".into()], 1);
        assert!(err.is_err());
    }

    #[test]
    fn resize_truncates() {
        let r = SparseRow::from_dense(&[1.0, 0.0, 2.0]);
        assert_eq!(r.resized(2).to_dense(), vec![1.0, 0.0]);
        assert_eq!(r.resized(4).to_dense(), vec![1.0, 0.0, 2.0, 0.0]);
    }
}
