//! End-to-end orchestration: ingest, scale, partition, filter, boost,
//! combine and evaluate.

mod config;
mod report;
mod scan;
mod train;

pub use config::{KernelChoice, RunConfig, HOLDOUT_FRACTION};
pub use report::{evaluate_model, mean_std, DataSummary, EvalReport, Evaluation, PartitionStats, RepetitionReport};
pub use scan::{aggregate_to_csv, gini_scan, gini_scan_dataset, AggregatePoint, PartitionScan, ScanSummary};
pub use train::{evaluate, load_inputs, predict, run_on_datasets, run_training, train_global, RunOutput, Timings};
