use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use log::{info, warn};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RunConfig, HOLDOUT_FRACTION};
use super::report::{evaluate_model, mean_std, DataSummary, EvalReport, Evaluation, PartitionStats, RepetitionReport};
use crate::data_io::{min_max_scale, partition, read_dataset, Dataset, Partition, ScalingSpec};
use crate::ensemble::{adaboost_train, BetaMode, GlobalModel, PartitionEnsemble, Provenance};
use crate::error::{Error, Result};
use crate::noise_filter::{filter_partition, gini_impurity, FilterConfig};
use crate::seeds::{self, Stream};

/// Wall-clock seconds per stage, summed over repetitions. Kept out of the
/// report so that reports stay byte-reproducible.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub load: f64,
    pub scale: f64,
    pub partition: f64,
    /// Summed over partitions (CPU-side view of the parallel stage).
    pub filter: f64,
    pub boost: f64,
    pub partition_stage_wall: f64,
    pub evaluate: f64,
}

pub struct RunOutput {
    /// Model of the first repetition.
    pub model: GlobalModel,
    pub report: EvalReport,
    pub timings: Timings,
}

struct PartitionOutcome {
    ensemble: PartitionEnsemble,
    stats: PartitionStats,
    filter_time: Duration,
    boost_time: Duration,
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::arg(format!("cannot start worker pool: {e}")))
}

/// Filter (optional), holdout split, boosting and beta for one partition.
fn train_partition(
    data: &Dataset,
    part: &Partition,
    cfg: &RunConfig,
    filter: Option<&FilterConfig>,
    rep_seed: u64,
) -> Result<PartitionOutcome> {
    let n_classes = data.n_classes();
    let gini_full = gini_impurity(&data.labels_of(&part.indices))?;
    let started = Instant::now();
    let (mut clean, chosen_p, gini_clean, gini_noisy, ratio, converged) = match filter {
        Some(_) if part.len() < 2 => {
            warn!("partition {} has a single instance; it is kept unfiltered", part.id);
            (part.indices.clone(), 1.0, None, None, None, true)
        }
        Some(fc) => {
            let result = filter_partition(part, data, fc)?;
            let point = result.chosen_point().cloned();
            (
                result.clean_indices,
                result.chosen_p,
                point.as_ref().map(|p| p.gini_clean),
                point.as_ref().map(|p| p.gini_noisy),
                point.and_then(|p| p.ratio.is_finite().then_some(p.ratio)),
                result.solver_converged,
            )
        }
        None => (part.indices.clone(), 1.0, None, None, None, true),
    };
    let filter_time = started.elapsed();
    let retained = clean.len();

    let started = Instant::now();
    let (fit_idx, holdout_idx) = match cfg.beta_mode {
        BetaMode::Holdout if clean.len() >= 3 => {
            clean.sort_unstable();
            clean.shuffle(&mut seeds::rng(seeds::sub_seed(rep_seed, Stream::Holdout, part.id as u64)));
            let h = ((HOLDOUT_FRACTION * clean.len() as f64).round() as usize).max(1);
            let holdout = clean.split_off(clean.len() - h);
            (clean, holdout)
        }
        BetaMode::Holdout => {
            warn!(
                "partition {}: {} clean instances are too few for a holdout; beta uses training accuracy",
                part.id,
                clean.len()
            );
            (clean, Vec::new())
        }
        BetaMode::Train => (clean, Vec::new()),
    };

    let x_fit = data.dense_rows_of(&fit_idx);
    let y_fit = data.labels_of(&fit_idx);
    let single_class = y_fit.iter().all(|&y| y == y_fit[0]);
    let mut ensemble = if single_class {
        PartitionEnsemble::constant(part.id, n_classes, y_fit[0])
    } else {
        adaboost_train(
            &x_fit,
            &y_fit,
            n_classes,
            &cfg.boost_config(),
            seeds::sub_seed(rep_seed, Stream::Learner, part.id as u64),
        )?
    };
    ensemble.partition_id = part.id;
    if holdout_idx.is_empty() {
        ensemble.compute_beta(&x_fit, &y_fit)?;
    } else {
        ensemble.compute_beta(&data.dense_rows_of(&holdout_idx), &data.labels_of(&holdout_idx))?;
    }
    let boost_time = started.elapsed();

    let stats = PartitionStats {
        partition_id: part.id,
        size: part.len(),
        retained,
        removed: part.len() - retained,
        chosen_p,
        gini_full,
        gini_clean,
        gini_noisy,
        ratio,
        beta: ensemble.beta,
        boosting_rounds: ensemble.members.len(),
        single_class,
        solver_converged: converged,
    };
    Ok(PartitionOutcome {
        ensemble,
        stats,
        filter_time,
        boost_time,
    })
}

/// Trains one global model on already-scaled data.
pub fn train_global(
    data: &Dataset,
    scaling: Option<ScalingSpec>,
    cfg: &RunConfig,
    repetition: usize,
    pool: &rayon::ThreadPool,
    timings: &mut Timings,
) -> Result<(GlobalModel, Vec<PartitionStats>)> {
    let rep_seed = cfg.seed.wrapping_add(repetition as u64);
    let started = Instant::now();
    let parts = partition(data, cfg.partitions, seeds::sub_seed(rep_seed, Stream::Partition, 0))?;
    timings.partition += started.elapsed().as_secs_f64();

    let filter = if cfg.filtering {
        Some(cfg.filter_config(data.dim())?)
    } else {
        None
    };
    let started = Instant::now();
    let outcomes: Vec<PartitionOutcome> = pool.install(|| {
        parts
            .par_iter()
            .map(|p| train_partition(data, p, cfg, filter.as_ref(), rep_seed).map_err(|e| e.in_partition(p.id)))
            .collect::<Result<Vec<_>>>()
    })?;
    timings.partition_stage_wall += started.elapsed().as_secs_f64();

    let mut ensembles = Vec::with_capacity(outcomes.len());
    let mut stats = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        timings.filter += o.filter_time.as_secs_f64();
        timings.boost += o.boost_time.as_secs_f64();
        ensembles.push(o.ensemble);
        stats.push(o.stats);
    }
    let provenance = Provenance {
        seed: cfg.seed,
        repetition,
        partitions: cfg.partitions,
        filtering: cfg.filtering,
        nu: cfg.nu,
        kernel: filter.as_ref().map(|f| f.svm.kernel),
        grid: filter.map(|f| f.grid).unwrap_or_default(),
        rounds: cfg.rounds,
        learner: cfg.learner,
        beta_mode: cfg.beta_mode,
        scaling: cfg.scaling,
    };
    let model = GlobalModel::new(provenance, data.dim(), data.label_names().to_vec(), scaling, ensembles)?;
    Ok((model, stats))
}

fn add_into(total: &mut [Vec<u64>], part: &[Vec<u64>]) {
    for (t, p) in total.iter_mut().zip(part) {
        for (a, b) in t.iter_mut().zip(p) {
            *a += b;
        }
    }
}

/// Runs every repetition on in-memory data. `test` of `None` evaluates on
/// the training set.
pub fn run_on_datasets(train: &Dataset, test: Option<&Dataset>, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let pool = thread_pool(cfg.jobs)?;
    let mut timings = Timings::default();

    let started = Instant::now();
    let (scaled, scaling) = if cfg.scaling {
        let (s, spec) = min_max_scale(train);
        (s, Some(spec))
    } else {
        (train.clone(), None)
    };
    timings.scale += started.elapsed().as_secs_f64();

    let eval_set = test.unwrap_or(train);
    let k = train.n_classes();
    let mut first_model = None;
    let mut reps = Vec::with_capacity(cfg.repetitions);
    let mut confusion = vec![vec![0u64; k]; k];
    let mut unseen: Vec<crate::data_io::ClassCount> = Vec::new();
    for r in 0..cfg.repetitions {
        let (model, stats) = train_global(&scaled, scaling.clone(), cfg, r, &pool, &mut timings)?;
        let started = Instant::now();
        let eval: Evaluation = evaluate_model(&model, eval_set)?;
        timings.evaluate += started.elapsed().as_secs_f64();
        info!("repetition {r}: accuracy {:.5}", eval.accuracy);
        add_into(&mut confusion, &eval.confusion);
        for u in eval.unseen_labels {
            match unseen.iter_mut().find(|c| c.label == u.label) {
                Some(c) => c.count += u.count,
                None => unseen.push(u),
            }
        }
        reps.push(RepetitionReport {
            repetition: r,
            seed: cfg.seed.wrapping_add(r as u64),
            accuracy: eval.accuracy,
            partitions: stats,
        });
        if first_model.is_none() {
            first_model = Some(model);
        }
    }

    let accuracies: Vec<f64> = reps.iter().map(|r| r.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accuracies);
    let mut notes = vec![
        "retained fraction p: the top-scoring share of each partition kept as clean".to_string(),
    ];
    if cfg.filtering {
        notes.push(format!(
            "one-class SVM kernel and nu are tool defaults or user flags (nu = {}, kernel = {:?})",
            cfg.nu,
            cfg.kernel.resolve(train.dim())
        ));
    }
    let report = EvalReport {
        config: cfg.clone(),
        train: DataSummary {
            n: train.n(),
            d: train.dim(),
            k,
        },
        evaluated_on: if test.is_some() { "test" } else { "train" }.to_string(),
        label_names: train.label_names().to_vec(),
        repetitions: reps,
        mean_accuracy,
        std_accuracy,
        confusion,
        unseen_labels: unseen,
        notes,
    };
    Ok(RunOutput {
        model: first_model.expect("at least one repetition"),
        report,
        timings,
    })
}

pub fn load_inputs(cfg: &RunConfig) -> Result<(Dataset, Option<Dataset>)> {
    // fail on unreadable paths before parsing anything
    fs::metadata(&cfg.train_path)?;
    if let Some(p) = &cfg.test_path {
        fs::metadata(p)?;
    }
    let train = read_dataset(&cfg.train_path, cfg.format, cfg.label_column)?;
    let test = match &cfg.test_path {
        Some(p) => Some(read_dataset(p, cfg.format, cfg.label_column)?),
        None => None,
    };
    if let Some(t) = &test {
        check_dim(cfg.format, train.dim(), t)?;
    }
    Ok((train, test))
}

pub(crate) fn check_dim(format: crate::data_io::Format, train_dim: usize, test: &Dataset) -> Result<()> {
    use crate::data_io::Format;
    match format {
        Format::Csv if test.dim() != train_dim => Err(Error::arg(format!(
            "test set has {} features, model expects {train_dim}",
            test.dim()
        ))),
        Format::Libsvm if test.dim() > train_dim => {
            warn!(
                "test set uses feature indices up to {}, model has {train_dim}; extra features are ignored",
                test.dim()
            );
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Full pipeline from files: writes `model.json`, `report.json` and
/// `timings.json` into the output directory.
pub fn run_training(cfg: &RunConfig) -> Result<(GlobalModel, EvalReport)> {
    cfg.validate()?;
    let started = Instant::now();
    let (train, test) = load_inputs(cfg)?;
    let load = started.elapsed().as_secs_f64();
    let mut out = run_on_datasets(&train, test.as_ref(), cfg)?;
    out.timings.load = load;
    write_outputs(&cfg.output_dir, &out)?;
    Ok((out.model, out.report))
}

fn write_outputs(dir: &Path, out: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("model.json"), out.model.to_json()?)?;
    fs::write(dir.join("report.json"), out.report.to_json()?)?;
    fs::write(
        dir.join("timings.json"),
        serde_json::to_string_pretty(&out.timings)? + "\n",
    )?;
    Ok(())
}

/// Loads a model file and scores it on a labelled file.
pub fn evaluate(model_path: &Path, test_path: &Path, format: crate::data_io::Format, label_column: usize) -> Result<Evaluation> {
    let model = GlobalModel::from_json(&fs::read_to_string(model_path)?)?;
    if fs::read_to_string(test_path)?.trim().is_empty() {
        return Err(Error::arg(format!("test file {} is empty", test_path.display())));
    }
    let test = read_dataset(test_path, format, label_column)?;
    check_dim(format, model.dim, &test)?;
    evaluate_model(&model, &test)
}

/// Predicted label token for every row of a file.
pub fn predict(model_path: &Path, input_path: &Path, format: crate::data_io::Format, label_column: usize) -> Result<Vec<String>> {
    let model = GlobalModel::from_json(&fs::read_to_string(model_path)?)?;
    let data = read_dataset(input_path, format, label_column)?;
    check_dim(format, model.dim, &data)?;
    Ok(data
        .rows()
        .iter()
        .map(|r| model.label_names[model.predict_raw(r)].clone())
        .collect())
}
