use std::fs;
use std::process::Command;

use noisegate::data_io::{min_max_scale, parse_libsvm, partition, Dataset, SparseRow};
use noisegate::ensemble::{adaboost_train, BetaMode, EnsembleMember, GlobalModel, PartitionEnsemble, Provenance};
use noisegate::learners::{LearnerParams, Stump, WeakHypothesis};
use noisegate::pipeline::{evaluate, evaluate_model, run_on_datasets, run_training, RunConfig, HOLDOUT_FRACTION};
use noisegate::seeds::{rng, sub_seed, Stream};
use noisegate::{synth, Error};
use rand::seq::SliceRandom;

fn small_config(train: &std::path::Path, out: &std::path::Path) -> RunConfig {
    let mut cfg = RunConfig::new(train);
    cfg.partitions = 4;
    cfg.rounds = 10;
    cfg.repetitions = 3;
    cfg.seed = 11;
    cfg.output_dir = out.to_path_buf();
    cfg
}

fn write_planted(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("train.svm");
    fs::write(&path, synth::planted_outliers(160, 0.9, 3, 0.1, 6.0, 5).unwrap().data.to_libsvm()).unwrap();
    path
}

#[test]
fn xor_smoke_without_filter() {
    let data = synth::xor(25).unwrap();
    let mut cfg = RunConfig::new("unused");
    cfg.partitions = 1;
    cfg.filtering = false;
    cfg.rounds = 20;
    cfg.repetitions = 1;
    let out = run_on_datasets(&data, None, &cfg).unwrap();
    let acc = out.report.repetitions[0].accuracy;
    assert!((0.0..=1.0).contains(&acc));
    assert_eq!(out.report.repetitions[0].partitions[0].chosen_p, 1.0);
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let train = write_planted(dir.path());
    for (name, jobs) in [("a", Some(1)), ("b", Some(4))] {
        let mut cfg = small_config(&train, &dir.path().join(name));
        cfg.jobs = jobs;
        run_training(&cfg).unwrap();
    }
    for file in ["report.json", "model.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert!(a == b, "{file} differs between runs");
    }
}

#[test]
fn report_accounting() {
    let planted = synth::planted_outliers(200, 0.9, 3, 0.1, 6.0, 2).unwrap();
    let test = synth::planted_outliers(90, 1.0, 3, 0.1, 6.0, 3).unwrap().data;
    let mut cfg = RunConfig::new("unused");
    cfg.partitions = 5;
    cfg.rounds = 10;
    cfg.repetitions = 4;
    let report = run_on_datasets(&planted.data, Some(&test), &cfg).unwrap().report;
    assert_eq!(report.repetitions.len(), 4);
    for rep in &report.repetitions {
        let sizes: usize = rep.partitions.iter().map(|p| p.size).sum();
        let kept: usize = rep.partitions.iter().map(|p| p.retained + p.removed).sum();
        assert_eq!((sizes, kept), (200, 200));
        for (i, p) in rep.partitions.iter().enumerate() {
            assert_eq!(p.partition_id, i);
            assert!((0.0..=1.0).contains(&p.beta));
        }
    }
    assert!((0.0..=1.0).contains(&report.mean_accuracy));
    let counts = test.class_counts();
    for (c, row) in report.confusion.iter().enumerate() {
        let label = &report.label_names[c];
        let test_id = test.label_names().iter().position(|l| l == label);
        let expected = test_id.map_or(0, |t| counts[t]) as u64 * 4;
        assert_eq!(row.iter().sum::<u64>(), expected, "class {label}");
    }
}

/// The no-filter path rebuilt here from the scaling, partitioning and
/// boosting pieces alone.
#[test]
fn unfiltered_model_matches_manual_construction() {
    let data = synth::noisy_two_class(120, 3.0, 0.1, 6.0, 4).unwrap().data;
    let mut cfg = RunConfig::new("unused");
    cfg.partitions = 3;
    cfg.rounds = 7;
    cfg.repetitions = 1;
    cfg.seed = 9;
    cfg.filtering = false;
    let model = run_on_datasets(&data, None, &cfg).unwrap().model;

    let (scaled, spec) = min_max_scale(&data);
    let parts = partition(&scaled, 3, sub_seed(9, Stream::Partition, 0)).unwrap();
    let mut ensembles = Vec::new();
    for p in &parts {
        let mut idx = p.indices.clone();
        idx.sort_unstable();
        idx.shuffle(&mut rng(sub_seed(9, Stream::Holdout, p.id as u64)));
        let h = ((HOLDOUT_FRACTION * idx.len() as f64).round() as usize).max(1);
        let holdout = idx.split_off(idx.len() - h);
        let x = scaled.dense_rows_of(&idx);
        let y = scaled.labels_of(&idx);
        let mut e = adaboost_train(&x, &y, 2, &cfg.boost_config(), sub_seed(9, Stream::Learner, p.id as u64)).unwrap();
        e.partition_id = p.id;
        e.compute_beta(&scaled.dense_rows_of(&holdout), &scaled.labels_of(&holdout)).unwrap();
        ensembles.push(e);
    }
    assert_eq!(model.scaling.as_ref(), Some(&spec));
    assert_eq!(model.ensembles, ensembles);
}

fn stump(feature: usize, threshold: f64, left: usize, right: usize) -> WeakHypothesis {
    WeakHypothesis::Stump(Stump {
        feature,
        threshold,
        left,
        right,
    })
}

fn hand_model() -> GlobalModel {
    let single = |pid, h, beta| PartitionEnsemble {
        partition_id: pid,
        n_classes: 2,
        beta,
        members: vec![EnsembleMember { alpha: 1.0, hypothesis: h }],
        references: None,
    };
    let provenance = Provenance {
        seed: 0,
        repetition: 0,
        partitions: 2,
        filtering: false,
        nu: 0.5,
        kernel: None,
        grid: vec![],
        rounds: 1,
        learner: LearnerParams::Stump,
        beta_mode: BetaMode::Train,
        scaling: false,
    };
    // feature 0 decides unless both partitions disagree; partition 0 has more say
    GlobalModel::new(
        provenance,
        2,
        vec!["neg".into(), "pos".into()],
        None,
        vec![single(0, stump(0, 0.5, 0, 1), 0.9), single(1, stump(1, 0.5, 0, 1), 0.6)],
    )
    .unwrap()
}

#[test]
fn hand_built_model_accuracy() {
    let model = hand_model();
    // predictions follow feature 0: (0,0)->neg (0,1)->neg (1,0)->pos (1,1)->pos
    let test = parse_libsvm("neg 1:0 2:0\npos 1:0 2:1\npos 1:1 2:0\nneg 1:1 2:1\n").unwrap();
    let eval = evaluate_model(&model, &test).unwrap();
    assert_eq!((eval.correct, eval.n), (2, 4));
    assert_eq!(eval.accuracy, 0.5);
    assert_eq!(eval.confusion, vec![vec![1, 1], vec![1, 1]]);
}

#[test]
fn unseen_labels_are_wrong_and_listed() {
    let model = hand_model();
    let test = parse_libsvm("pos 1:1 2:0\nzzz 1:1 2:0\nzzz 1:0 2:0\n").unwrap();
    let eval = evaluate_model(&model, &test).unwrap();
    assert_eq!(eval.correct, 1);
    assert_eq!(eval.unseen_labels.len(), 1);
    assert_eq!(eval.unseen_labels[0].label, "zzz");
    assert_eq!(eval.unseen_labels[0].count, 2);
}

#[test]
fn evaluate_files() {
    let dir = tempfile::tempdir().unwrap();
    let data = Dataset::new(
        (0..20).map(|i| SparseRow::from_dense(&[i as f64])).collect(),
        (0..20).map(|i| usize::from(i >= 10)).collect(),
        vec!["lo".into(), "hi".into()],
        1,
    )
    .unwrap();
    let train = dir.path().join("t.svm");
    fs::write(&train, data.to_libsvm()).unwrap();
    let mut cfg = small_config(&train, dir.path());
    cfg.filtering = false;
    cfg.partitions = 1;
    cfg.beta_mode = BetaMode::Train;
    run_training(&cfg).unwrap();
    let model = dir.path().join("model.json");
    let eval = evaluate(&model, &train, noisegate::data_io::Format::Libsvm, 0).unwrap();
    assert_eq!(eval.accuracy, 1.0);

    let empty = dir.path().join("empty.svm");
    fs::write(&empty, "").unwrap();
    let err = evaluate(&model, &empty, noisegate::data_io::Format::Libsvm, 0).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
}

#[test]
fn missing_input_fails_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(&dir.path().join("absent.svm"), &dir.path().join("out"));
    assert!(matches!(run_training(&cfg), Err(Error::Io(_))));
    assert!(!dir.path().join("out").exists());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noisegate"))
}

#[test]
fn cli_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let train = write_planted(dir.path());
    let out = dir.path().join("run");

    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(["train", "--bogus"]).output().unwrap().status.code(), Some(2));
    let missing = bin().arg("train").output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--train"));
    let absent = bin().args(["train", "--train", "/nonexistent/file.svm"]).output().unwrap();
    assert_eq!(absent.status.code(), Some(3));

    let ok = bin()
        .args(["train", "--partitions", "4", "--reps", "2", "--rounds", "5", "--train"])
        .arg(&train)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    for f in ["model.json", "report.json", "timings.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let predicted = bin()
        .arg("predict")
        .arg("--model")
        .arg(out.join("model.json"))
        .arg("--input")
        .arg(&train)
        .output()
        .unwrap();
    assert_eq!(predicted.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&predicted.stdout).lines().count(), 160);

    let scan_dir = dir.path().join("scan");
    let scan = bin()
        .args(["gini-scan", "--partitions", "4", "--train"])
        .arg(&train)
        .arg("--out")
        .arg(&scan_dir)
        .output()
        .unwrap();
    assert_eq!(scan.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&scan.stdout);
    assert!(stdout.contains("modal best p"), "{stdout}");
    let agg = fs::read_to_string(scan_dir.join("scan_aggregate.csv")).unwrap();
    assert!(agg.starts_with("p,gini_clean,gini_noisy,ratio,gini_full\n"));
    assert_eq!(agg.lines().count(), 20);
    let per = fs::read_to_string(scan_dir.join("scan_partition_000.csv")).unwrap();
    assert!(per.starts_with("p,gini_clean,gini_noisy,ratio\n"));
}

#[test]
fn degenerate_partition_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("flat.svm");
    fs::write(&train, "a 1:1\nb 1:1\na 1:1\nb 1:1\na 1:1\nb 1:1\n").unwrap();
    let run = bin()
        .args(["train", "--partitions", "1", "--no-filter", "--beta-mode", "train", "--reps", "1", "--train"])
        .arg(&train)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(4), "{}", String::from_utf8_lossy(&run.stderr));
}
