//! One-class SVM: dual solver, decision function and model persistence.

mod cache;
mod kernel;
mod model;
mod solver;

pub use kernel::{kernel_eval, KernelSpec};
pub use model::{OcSvmModel, OCSVM_FORMAT_VERSION};
pub use solver::{train_ocsvm, OcSvmFit, OcSvmParams, DEFAULT_CACHE_BYTES};

use crate::data_io::SparseRow;
use crate::error::Result;

pub fn decision_value(model: &OcSvmModel, x: &SparseRow) -> Result<f64> {
    model.decision_value(x)
}

pub fn predict_membership(model: &OcSvmModel, x: &SparseRow) -> Result<i8> {
    model.predict_membership(x)
}

pub fn kkt_residual(model: &OcSvmModel, x: &[SparseRow]) -> f64 {
    model.kkt_residual(x)
}
