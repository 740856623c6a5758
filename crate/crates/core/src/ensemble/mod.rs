//! Per-partition boosting and the beta-weighted global vote.

mod boost;
mod global;

pub use boost::{
    adaboost_train, adaboost_train_traced, compute_beta, ensemble_predict, samme_alpha, BoostConfig,
    EnsembleMember, PartitionEnsemble, RoundRecord, PERFECT_ERROR,
};
pub use global::{global_predict, BetaMode, GlobalModel, Provenance, MODEL_FORMAT_VERSION};
