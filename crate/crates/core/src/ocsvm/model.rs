use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::data_io::SparseRow;
use crate::error::{Error, Result};

pub const OCSVM_FORMAT_VERSION: u32 = 1;

/// Trained one-class boundary expressed through its dual expansion
/// `f(x) = sum_i alpha_i k(sv_i, x) - rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcSvmModel {
    pub kernel: KernelSpec,
    pub nu: f64,
    pub rho: f64,
    /// Size of the training set, which fixes the box bound `1/(nu * n_train)`.
    pub n_train: usize,
    /// Positions of the support vectors in the training set.
    pub support_indices: Vec<usize>,
    pub support_vectors: Vec<SparseRow>,
    pub alphas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct OcSvmRecord {
    format_version: u32,
    #[serde(flatten)]
    model: OcSvmModel,
}

/// Smallest `rho` consistent with the complementary slackness conditions:
/// mean margin value over free coefficients, otherwise the midpoint of the
/// feasible interval left by bound and zero coefficients.
pub(crate) fn offset_from_gradient(alpha: &[f64], grad: &[f64], upper: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut bound_max = f64::NEG_INFINITY;
    let mut zero_min = f64::INFINITY;
    for (&a, &g) in alpha.iter().zip(grad) {
        if a <= 0.0 {
            zero_min = zero_min.min(g);
        } else if a >= upper {
            bound_max = bound_max.max(g);
        } else {
            free_sum += g;
            free_count += 1;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if bound_max.is_finite() && zero_min.is_finite() {
        0.5 * (bound_max + zero_min)
    } else if bound_max.is_finite() {
        bound_max
    } else {
        zero_min
    }
}

pub(crate) fn box_upper(nu: f64, n: usize) -> f64 {
    1.0 / (nu * n as f64)
}

impl OcSvmModel {
    /// Builds a model from a full dual vector over `x`, computing `rho` with
    /// the same rule the solver uses. Zero coefficients are dropped.
    pub fn from_dual(x: &[SparseRow], alphas: &[f64], nu: f64, kernel: KernelSpec) -> Result<Self> {
        if x.len() != alphas.len() {
            return Err(Error::arg("one coefficient per training row is required"));
        }
        let grad: Vec<f64> = x
            .iter()
            .map(|xi| {
                x.iter()
                    .zip(alphas)
                    .filter(|(_, &a)| a != 0.0)
                    .map(|(xj, &a)| a * kernel.eval_unchecked(xj, xi))
                    .sum()
            })
            .collect();
        let rho = offset_from_gradient(alphas, &grad, box_upper(nu, x.len()));
        Ok(Self::assemble(x, alphas, nu, kernel, rho))
    }

    pub(crate) fn assemble(
        x: &[SparseRow],
        alphas: &[f64],
        nu: f64,
        kernel: KernelSpec,
        rho: f64,
    ) -> Self {
        let support_indices: Vec<usize> = (0..x.len()).filter(|&i| alphas[i] > 0.0).collect();
        OcSvmModel {
            kernel,
            nu,
            rho,
            n_train: x.len(),
            support_vectors: support_indices.iter().map(|&i| x[i].clone()).collect(),
            alphas: support_indices.iter().map(|&i| alphas[i]).collect(),
            support_indices,
        }
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, SparseRow::dim)
    }

    pub fn upper_bound(&self) -> f64 {
        box_upper(self.nu, self.n_train)
    }

    /// Checks the dual feasibility invariants instead of trusting the solver.
    pub fn check_feasible(&self) -> Result<()> {
        if self.support_vectors.is_empty() {
            return Err(Error::Degenerate("one-class model has no support vectors".into()));
        }
        let upper = self.upper_bound();
        if let Some(a) = self
            .alphas
            .iter()
            .find(|&&a| !(a > 0.0 && a <= upper * (1.0 + 1e-12)))
        {
            return Err(Error::Degenerate(format!(
                "coefficient {a} outside (0, {upper}]"
            )));
        }
        let sum: f64 = self.alphas.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Degenerate(format!("coefficients sum to {sum}, not 1")));
        }
        Ok(())
    }

    fn expansion(&self, x: &SparseRow) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.alphas)
            .map(|(sv, &a)| a * self.kernel.eval_unchecked(sv, x))
            .sum()
    }

    /// `sum_i alpha_i k(sv_i, x) - rho`; larger means more inlier-like.
    pub fn decision_value(&self, x: &SparseRow) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::arg(format!(
                "query of dimension {} against model of dimension {}",
                x.dim(),
                self.dim()
            )));
        }
        Ok(self.expansion(x) - self.rho)
    }

    /// +1 inside the boundary (including exactly on it), -1 outside.
    pub fn predict_membership(&self, x: &SparseRow) -> Result<i8> {
        Ok(if self.decision_value(x)? >= 0.0 { 1 } else { -1 })
    }

    /// `1/2 sum_ij alpha_i alpha_j k(sv_i, sv_j)`.
    pub fn dual_objective(&self) -> f64 {
        let mut total = 0.0;
        for (xi, &ai) in self.support_vectors.iter().zip(&self.alphas) {
            total += ai * self.expansion(xi);
        }
        0.5 * total
    }

    /// Largest violation of the dual optimality conditions on the training
    /// rows `x`: box and simplex feasibility of the coefficients, and for
    /// each point `g_i >= rho` (alpha = 0), `g_i <= rho` (alpha at the
    /// bound), `g_i = rho` (free), where `g_i = sum_j alpha_j k(x_j, x_i)`.
    pub fn kkt_residual(&self, x: &[SparseRow]) -> f64 {
        let upper = box_upper(self.nu, x.len());
        let mut full = vec![0.0; x.len()];
        let mut worst: f64 = 0.0;
        for (&i, &a) in self.support_indices.iter().zip(&self.alphas) {
            match full.get_mut(i) {
                Some(slot) => *slot += a,
                None => return f64::INFINITY,
            }
        }
        let sum: f64 = full.iter().sum();
        worst = worst.max((sum - 1.0).abs());
        for (xi, &a) in x.iter().zip(&full) {
            worst = worst.max(-a).max(a - upper);
            let g = self.expansion(xi);
            let v = if a <= 0.0 {
                self.rho - g
            } else if a >= upper {
                g - self.rho
            } else {
                (g - self.rho).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&OcSvmRecord {
            format_version: OCSVM_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Format("missing format_version".into()))?;
        if version > OCSVM_FORMAT_VERSION as u64 {
            return Err(Error::Format(format!(
                "one-class model format version {version} is newer than supported version {OCSVM_FORMAT_VERSION}"
            )));
        }
        let record: OcSvmRecord = serde_json::from_value(value)?;
        record.model.kernel.validate()?;
        Ok(record.model)
    }
}
