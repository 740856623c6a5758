use serde::{Deserialize, Serialize};

use super::boost::PartitionEnsemble;
use crate::data_io::{ScalingSpec, SparseRow};
use crate::error::{Error, Result};
use crate::learners::{argmax, LearnerParams};
use crate::ocsvm::KernelSpec;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    /// Accuracy on a held-out 20% of each cleaned partition.
    Holdout,
    /// Training accuracy of the partition ensemble.
    Train,
}

/// Settings a model was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub repetition: usize,
    pub partitions: usize,
    pub filtering: bool,
    pub nu: f64,
    pub kernel: Option<KernelSpec>,
    pub grid: Vec<f64>,
    pub rounds: usize,
    pub learner: LearnerParams,
    pub beta_mode: BetaMode,
    pub scaling: bool,
}

/// Partition ensembles combined by beta-weighted voting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalModel {
    pub provenance: Provenance,
    pub dim: usize,
    pub label_names: Vec<String>,
    pub scaling: Option<ScalingSpec>,
    pub ensembles: Vec<PartitionEnsemble>,
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    format_version: u32,
    #[serde(flatten)]
    model: &'a GlobalModel,
}

#[derive(Deserialize)]
struct ModelFileIn {
    #[allow(dead_code)]
    format_version: u32,
    #[serde(flatten)]
    model: GlobalModel,
}

impl GlobalModel {
    pub fn new(
        provenance: Provenance,
        dim: usize,
        label_names: Vec<String>,
        scaling: Option<ScalingSpec>,
        ensembles: Vec<PartitionEnsemble>,
    ) -> Result<Self> {
        let model = GlobalModel {
            provenance,
            dim,
            label_names,
            scaling,
            ensembles,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    fn validate(&self) -> Result<()> {
        if self.ensembles.is_empty() {
            return Err(Error::Format("model holds no partition ensembles".into()));
        }
        for e in &self.ensembles {
            if e.n_classes != self.n_classes() {
                return Err(Error::Format(format!(
                    "partition {} has {} classes, vocabulary has {}",
                    e.partition_id,
                    e.n_classes,
                    self.n_classes()
                )));
            }
            if !(0.0..=1.0).contains(&e.beta) {
                return Err(Error::Format(format!(
                    "partition {} beta {} outside [0, 1]",
                    e.partition_id, e.beta
                )));
            }
            if e.members.is_empty() || e.members.iter().any(|m| !(m.alpha > 0.0)) {
                return Err(Error::Format(format!(
                    "partition {} needs members with positive alpha",
                    e.partition_id
                )));
            }
        }
        if let Some(s) = &self.scaling {
            if s.dim() != self.dim {
                return Err(Error::Format("scaling dimension differs from model dimension".into()));
            }
        }
        Ok(())
    }

    /// `argmax_k sum_m beta_m [H_m(x) = k]` on an already scaled dense row.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0.0; self.n_classes()];
        for e in &self.ensembles {
            votes[e.predict(x)] += e.beta;
        }
        argmax(&votes)
    }

    /// Applies the stored scaling to a raw row before voting.
    pub fn predict_raw(&self, row: &SparseRow) -> usize {
        let row = match &self.scaling {
            Some(spec) => spec.apply_row(row),
            None => row.resized(self.dim),
        };
        self.predict(&row.to_dense())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&ModelFileOut {
            format_version: MODEL_FORMAT_VERSION,
            model: self,
        })?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Format("model file lacks format_version".into()))?;
        if version > u64::from(MODEL_FORMAT_VERSION) {
            return Err(Error::Format(format!(
                "model format version {version} is newer than the supported version {MODEL_FORMAT_VERSION}; upgrade noisegate to read it"
            )));
        }
        let file: ModelFileIn = serde_json::from_value(value)?;
        let mut model = file.model;
        for e in &mut model.ensembles {
            e.attach_references();
        }
        model.validate()?;
        Ok(model)
    }
}

pub fn global_predict(g: &GlobalModel, x: &[f64]) -> usize {
    g.predict(x)
}
