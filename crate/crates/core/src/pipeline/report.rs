use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::data_io::{ClassCount, Dataset};
use crate::ensemble::GlobalModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub partition_id: usize,
    pub size: usize,
    pub retained: usize,
    pub removed: usize,
    /// 1.0 when filtering is off.
    pub chosen_p: f64,
    pub gini_full: f64,
    pub gini_clean: Option<f64>,
    pub gini_noisy: Option<f64>,
    /// `None` when filtering is off or the ratio is infinite.
    pub ratio: Option<f64>,
    pub beta: f64,
    pub boosting_rounds: usize,
    pub single_class: bool,
    pub solver_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionReport {
    pub repetition: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub partitions: Vec<PartitionStats>,
}

/// Accuracy and confusion matrix of one model on one labelled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub label_names: Vec<String>,
    /// `confusion[true][predicted]` over the model's vocabulary.
    pub confusion: Vec<Vec<u64>>,
    /// Test labels the model never saw; always counted as errors.
    pub unseen_labels: Vec<ClassCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: RunConfig,
    pub train: DataSummary,
    /// `"test"` or, when no test file was given, `"train"`.
    pub evaluated_on: String,
    pub label_names: Vec<String>,
    pub repetitions: Vec<RepetitionReport>,
    pub mean_accuracy: f64,
    /// Sample standard deviation across repetitions (0 for a single one).
    pub std_accuracy: f64,
    /// Summed over repetitions.
    pub confusion: Vec<Vec<u64>>,
    pub unseen_labels: Vec<ClassCount>,
    pub notes: Vec<String>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Scores `model` on `data`, matching labels by token.
pub fn evaluate_model(model: &GlobalModel, data: &Dataset) -> Result<Evaluation> {
    if data.n() == 0 {
        return Err(Error::arg("evaluation set is empty"));
    }
    let k = model.n_classes();
    let mapping: Vec<Option<usize>> = data
        .label_names()
        .iter()
        .map(|name| model.label_names.iter().position(|m| m == name))
        .collect();
    let mut confusion = vec![vec![0u64; k]; k];
    let mut unseen = vec![0usize; data.n_classes()];
    let mut correct = 0;
    for (row, &y) in data.rows().iter().zip(data.labels()) {
        let predicted = model.predict_raw(row);
        match mapping[y] {
            Some(truth) => {
                confusion[truth][predicted] += 1;
                if truth == predicted {
                    correct += 1;
                }
            }
            None => unseen[y] += 1,
        }
    }
    let unseen_labels = data
        .label_names()
        .iter()
        .zip(&unseen)
        .filter(|(_, &c)| c > 0)
        .map(|(label, &count)| ClassCount {
            label: label.clone(),
            count,
        })
        .collect();
    Ok(Evaluation {
        n: data.n(),
        correct,
        accuracy: correct as f64 / data.n() as f64,
        label_names: model.label_names.clone(),
        confusion,
        unseen_labels,
    })
}
