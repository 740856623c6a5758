//! Dataset parsing, scaling and random partitioning.

mod dataset;
mod parse;
mod partition;
mod scale;

pub use dataset::{ClassCount, Dataset, DatasetStats, LabelEncoder, SparseRow};
pub use parse::{parse_csv, parse_libsvm, read_dataset, Format};
pub use partition::{partition, partition_indices, Partition};
pub use scale::{apply_scale, min_max_scale, ScalingSpec};
