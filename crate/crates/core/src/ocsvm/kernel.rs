use serde::{Deserialize, Serialize};

use crate::data_io::SparseRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-gamma * |x - z|^2)`
    Rbf { gamma: f64 },
    /// `<x, z>`
    Linear,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => Err(Error::arg(
                format!("rbf gamma must be positive and finite, got {gamma}"),
            )),
            _ => Ok(()),
        }
    }

    /// Kernel value without the dimension check; callers guarantee it.
    pub(crate) fn eval_unchecked(&self, x: &SparseRow, z: &SparseRow) -> f64 {
        match *self {
            KernelSpec::Rbf { gamma } => (-gamma * x.sq_dist(z)).exp(),
            KernelSpec::Linear => x.dot(z),
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &SparseRow, z: &SparseRow) -> Result<f64> {
    if x.dim() != z.dim() {
        return Err(Error::arg(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            z.dim()
        )));
    }
    Ok(spec.eval_unchecked(x, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f64]) -> SparseRow {
        SparseRow::from_dense(v)
    }

    #[test]
    fn rbf_self_similarity_is_one() {
        let x = row(&[0.3, -1.0, 2.0]);
        for gamma in [1e-3, 0.5, 40.0] {
            assert_eq!(kernel_eval(&KernelSpec::Rbf { gamma }, &x, &x).unwrap(), 1.0);
        }
    }

    #[test]
    fn linear_dot() {
        let k = kernel_eval(&KernelSpec::Linear, &row(&[1.0, 2.0]), &row(&[3.0, 4.0])).unwrap();
        assert_eq!(k, 11.0);
    }

    #[test]
    fn rbf_formula() {
        let k = kernel_eval(
            &KernelSpec::Rbf { gamma: 0.5 },
            &row(&[0.0, 0.0]),
            &row(&[2.0, 0.0]),
        )
        .unwrap();
        assert!((k - (-2.0f64).exp()).abs() < 1e-15);
        assert!((k - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch() {
        let r = kernel_eval(&KernelSpec::Linear, &row(&[1.0]), &row(&[1.0, 2.0]));
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: -1.0 }.validate().is_err());
        assert!(KernelSpec::Linear.validate().is_ok());
    }
}
