//! Readers for the two supported text formats.
//!
//! LIBSVM: `<label> <idx>:<val> ...` with strictly increasing 1-based
//! indices. CSV: a rectangular numeric table with one label column.
//! Labels are encoded in first-appearance order in both cases.

use std::fs;
use std::path::Path;

use super::dataset::{Dataset, LabelEncoder, SparseRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Libsvm,
    Csv,
}

pub fn parse_libsvm(text: &str) -> Result<Dataset> {
    let mut encoder = LabelEncoder::default();
    let mut entries: Vec<(Vec<u32>, Vec<f64>)> = Vec::new();
    let mut labels = Vec::new();
    let mut dim = 0usize;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else {
            continue;
        };
        if label.contains(':') {
            return Err(Error::parse(lineno, format!("missing label before {label:?}")));
        }
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(Error::parse(lineno, "feature indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(lineno, format!("non-numeric value {val:?}")))?;
            if !val.is_finite() {
                return Err(Error::parse(lineno, format!("non-finite value {val:?}")));
            }
            let j = (idx - 1) as u32;
            if indices.last().is_some_and(|&prev| prev >= j) {
                return Err(Error::parse(
                    lineno,
                    format!("feature index {idx} is not strictly increasing"),
                ));
            }
            indices.push(j);
            values.push(val);
            dim = dim.max(idx);
        }
        labels.push(encoder.encode(label));
        entries.push((indices, values));
    }

    if entries.is_empty() {
        return Err(Error::parse(0, "no instances"));
    }
    let rows = entries
        .into_iter()
        .map(|(i, v)| SparseRow::new(dim, i, v))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(rows, labels, encoder.into_names(), dim)
}

pub fn parse_csv(text: &str, label_column: usize) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut encoder = LabelEncoder::default();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => {
                if label_column >= record.len() {
                    return Err(Error::arg(format!(
                        "label column {label_column} out of range for {} columns",
                        record.len()
                    )));
                }
                width = Some(record.len());
            }
            Some(w) if w != record.len() => {
                return Err(Error::parse(
                    line,
                    format!("ragged row: expected {w} fields, found {}", record.len()),
                ));
            }
            Some(_) => {}
        }
        let mut dense = Vec::with_capacity(record.len() - 1);
        for (c, field) in record.iter().enumerate() {
            if c == label_column {
                labels.push(encoder.encode(field));
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(line, format!("non-numeric value {field:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(line, format!("non-finite value {field:?}")));
            }
            dense.push(v);
        }
        rows.push(SparseRow::from_dense(&dense));
    }

    let Some(width) = width else {
        return Err(Error::parse(0, "no instances"));
    };
    Dataset::new(rows, labels, encoder.into_names(), width - 1)
}

pub fn read_dataset(path: &Path, format: Format, label_column: usize) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    match format {
        Format::Libsvm => parse_libsvm(&text),
        Format::Csv => parse_csv(&text, label_column),
    }
}
