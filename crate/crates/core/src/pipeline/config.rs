use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::data_io::Format;
use crate::ensemble::{BetaMode, BoostConfig};
use crate::error::{Error, Result};
use crate::learners::LearnerParams;
use crate::noise_filter::{default_grid, FilterConfig};
use crate::ocsvm::{KernelSpec, OcSvmParams, DEFAULT_CACHE_BYTES};

/// Kernel as requested on the command line; an rbf gamma of `None`
/// resolves to `1/d` once the training dimension is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelChoice {
    Rbf { gamma: Option<f64> },
    Linear,
}

impl KernelChoice {
    pub fn resolve(&self, dim: usize) -> KernelSpec {
        match *self {
            KernelChoice::Rbf { gamma: Some(gamma) } => KernelSpec::Rbf { gamma },
            KernelChoice::Rbf { gamma: None } => KernelSpec::Rbf {
                gamma: 1.0 / dim.max(1) as f64,
            },
            KernelChoice::Linear => KernelSpec::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub train_path: PathBuf,
    pub test_path: Option<PathBuf>,
    pub format: Format,
    pub label_column: usize,
    pub partitions: usize,
    pub nu: f64,
    pub kernel: KernelChoice,
    pub tol: f64,
    pub grid_step: f64,
    pub learner: LearnerParams,
    pub rounds: usize,
    pub seed: u64,
    pub filtering: bool,
    pub beta_mode: BetaMode,
    pub scaling: bool,
    pub repetitions: usize,
    /// Not part of the reported configuration: neither changes any result.
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

pub const HOLDOUT_FRACTION: f64 = 0.2;

impl RunConfig {
    pub fn new(train_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            train_path: train_path.into(),
            test_path: None,
            format: Format::Libsvm,
            label_column: 0,
            partitions: 50,
            nu: 0.5,
            kernel: KernelChoice::Rbf { gamma: None },
            tol: 1e-3,
            grid_step: 0.05,
            learner: LearnerParams::Stump,
            rounds: 50,
            seed: 0,
            filtering: true,
            beta_mode: BetaMode::Holdout,
            scaling: true,
            repetitions: 50,
            output_dir: PathBuf::from("."),
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.partitions == 0 {
            return Err(Error::arg("--partitions must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(Error::arg("--reps must be at least 1"));
        }
        if self.rounds == 0 {
            return Err(Error::arg("--rounds must be at least 1"));
        }
        if self.jobs == Some(0) {
            return Err(Error::arg("--jobs must be at least 1"));
        }
        if let KernelChoice::Rbf { gamma: Some(g) } = self.kernel {
            KernelSpec::Rbf { gamma: g }.validate()?;
        }
        match self.learner {
            LearnerParams::RandomTree {
                max_depth,
                k_candidates,
            } if max_depth == 0 || k_candidates == Some(0) => {
                return Err(Error::arg("tree depth and candidate count must be at least 1"))
            }
            LearnerParams::Knn { k: 0 } => return Err(Error::arg("k-NN needs k >= 1")),
            _ => {}
        }
        default_grid(self.grid_step)?;
        if self.filtering {
            self.svm_params(KernelSpec::Linear).validate()?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        default_grid(self.grid_step)
    }

    pub fn svm_params(&self, kernel: KernelSpec) -> OcSvmParams {
        OcSvmParams {
            nu: self.nu,
            kernel,
            tol: self.tol,
            max_iter: None,
            cache_bytes: DEFAULT_CACHE_BYTES,
        }
    }

    pub fn filter_config(&self, dim: usize) -> Result<FilterConfig> {
        Ok(FilterConfig {
            svm: self.svm_params(self.kernel.resolve(dim)),
            grid: self.grid()?,
        })
    }

    pub fn boost_config(&self) -> BoostConfig {
        BoostConfig {
            rounds: self.rounds,
            learner: self.learner,
        }
    }
}
