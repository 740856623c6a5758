//! Partitioned boosting ensembles with one-class SVM noise filtering.
//!
//! Training data is cut into random partitions. Each partition is scored by
//! a one-class SVM, the lowest-scoring instances are dropped at the retained
//! fraction that minimizes `gini(clean) / gini(noisy)`, a SAMME booster is
//! trained on what remains, and the partition ensembles vote with weights
//! equal to their measured accuracy.

pub mod cli;
pub mod data_io;
pub mod ensemble;
pub mod error;
pub mod learners;
pub mod noise_filter;
pub mod ocsvm;
pub mod pipeline;
pub mod seeds;
pub mod synth;

pub use error::{Error, Result};
