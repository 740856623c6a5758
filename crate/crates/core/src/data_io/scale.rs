use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, SparseRow};

/// Per-column `(min, max)` observed on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalingSpec {
    pub fn identity(dim: usize) -> Self {
        ScalingSpec {
            mins: vec![0.0; dim],
            maxs: vec![1.0; dim],
        }
    }

    pub fn fit(data: &Dataset) -> Self {
        let d = data.dim();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        let mut explicit = vec![0usize; d];
        for row in data.rows() {
            for (j, v) in row.iter() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
                explicit[j] += 1;
            }
        }
        // implicit zeros of sparse rows are observed values too
        for j in 0..d {
            if explicit[j] < data.n() {
                mins[j] = mins[j].min(0.0);
                maxs[j] = maxs[j].max(0.0);
            }
        }
        ScalingSpec { mins, maxs }
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    pub fn scale_value(&self, j: usize, v: f64) -> f64 {
        let (lo, hi) = (self.mins[j], self.maxs[j]);
        if hi <= lo {
            return 0.0;
        }
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    /// Scales one row into this spec's dimension; columns past it are dropped.
    pub fn apply_row(&self, row: &SparseRow) -> SparseRow {
        let dense: Vec<f64> = (0..self.dim())
            .map(|j| {
                let v = if j < row.dim() { row.get(j) } else { 0.0 };
                self.scale_value(j, v)
            })
            .collect();
        SparseRow::from_dense(&dense)
    }
}

pub fn min_max_scale(train: &Dataset) -> (Dataset, ScalingSpec) {
    let spec = ScalingSpec::fit(train);
    (apply_scale(&spec, train), spec)
}

pub fn apply_scale(spec: &ScalingSpec, data: &Dataset) -> Dataset {
    let rows = data.rows().iter().map(|r| spec.apply_row(r)).collect();
    Dataset::new(
        rows,
        data.labels().to_vec(),
        data.label_names().to_vec(),
        spec.dim(),
    )
    .expect("scaling preserves dataset invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_io::parse_csv;

    fn column(values: &[f64]) -> Dataset {
        let text: String = values.iter().map(|v| format!("{v},a\n")).collect();
        parse_csv(&text, 1).unwrap()
    }

    fn col0(d: &Dataset) -> Vec<f64> {
        d.rows().iter().map(|r| r.get(0)).collect()
    }

    #[test]
    fn maps_range_to_unit_interval() {
        let (scaled, spec) = min_max_scale(&column(&[0.0, 5.0, 10.0]));
        assert_eq!(col0(&scaled), vec![0.0, 0.5, 1.0]);
        assert_eq!((spec.mins[0], spec.maxs[0]), (0.0, 10.0));
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let (scaled, _) = min_max_scale(&column(&[3.0, 3.0, 3.0]));
        assert_eq!(col0(&scaled), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn unseen_values_are_clamped() {
        let (_, spec) = min_max_scale(&column(&[0.0, 10.0]));
        let test = apply_scale(&spec, &column(&[12.0, -3.0, 5.0]));
        assert_eq!(col0(&test), vec![1.0, 0.0, 0.5]);
    }

    #[test]
    fn sparse_implicit_zeros_count() {
        let d = crate::data_io::parse_libsvm("a 1:4\nb 2:1").unwrap();
        let (scaled, spec) = min_max_scale(&d);
        assert_eq!(spec.mins, vec![0.0, 0.0]);
        assert_eq!(scaled.row(0).to_dense(), vec![1.0, 0.0]);
    }

    #[test]
    fn identity_spec_is_noop_on_unit_data() {
        let (scaled, _) = min_max_scale(&column(&[1.0, 2.0, 7.0]));
        assert_eq!(apply_scale(&ScalingSpec::identity(1), &scaled), scaled);
    }
}
