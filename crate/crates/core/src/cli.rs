//! Command-line front end.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data_io::Format;
use crate::ensemble::BetaMode;
use crate::error::Result;
use crate::learners::LearnerParams;
use crate::pipeline::{self, KernelChoice, RunConfig};
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "noisegate", version, about = "Partitioned boosting with one-class SVM noise filtering")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Train partition ensembles and write model.json, report.json and timings.json.
    Train(TrainArgs),
    /// Score a saved model on a labelled file.
    Evaluate(EvaluateArgs),
    /// Write per-partition and aggregate Gini scans of the training file.
    GiniScan(ScanArgs),
    /// Print one predicted label per input row.
    Predict(PredictArgs),
    /// Write a synthetic dataset in LIBSVM format.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Libsvm,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Libsvm => Format::Libsvm,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Rbf,
    Linear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LearnerArg {
    Stump,
    Tree,
    Knn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BetaArg {
    Holdout,
    Train,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Gaussian blob of one dominant class with a ring of label-flipped outliers.
    Planted,
    /// Two Gaussian classes plus far outliers labelled against their side.
    TwoClass,
    Xor,
    /// Uniform features with a uniform class histogram.
    Uniform,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Training file.
    #[arg(long = "train")]
    train: PathBuf,
    #[arg(long, value_enum, default_value = "libsvm")]
    format: FormatArg,
    /// Zero-based label column for CSV input.
    #[arg(long = "label-col", default_value_t = 0)]
    label_col: usize,
    #[arg(long, default_value_t = 50)]
    partitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip min-max scaling to [0, 1].
    #[arg(long = "no-scale")]
    no_scale: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for the per-partition stage (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// One-class SVM nu in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    nu: f64,
    #[arg(long, value_enum, default_value = "rbf")]
    kernel: KernelArg,
    /// RBF width; defaults to 1/d.
    #[arg(long)]
    gamma: Option<f64>,
    /// Spacing of the retained-fraction grid.
    #[arg(long = "grid-step", default_value_t = 0.05)]
    grid_step: f64,
    /// Solver stopping tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Labelled test file; without it the training file is evaluated.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "stump")]
    learner: LearnerArg,
    #[arg(long = "max-depth", default_value_t = 4)]
    max_depth: usize,
    /// Features tried per tree node (default: ceil(sqrt(d))).
    #[arg(long)]
    candidates: Option<usize>,
    /// Neighbours for the k-NN learner.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Boosting rounds per partition.
    #[arg(long, default_value_t = 50)]
    rounds: usize,
    #[arg(long = "no-filter")]
    no_filter: bool,
    #[arg(long = "beta-mode", value_enum, default_value = "holdout")]
    beta_mode: BetaArg,
    #[arg(long, default_value_t = 50)]
    reps: usize,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    filter: FilterArgs,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum, default_value = "libsvm")]
    format: FormatArg,
    #[arg(long = "label-col", default_value_t = 0)]
    label_col: usize,
    /// Also write evaluation.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Rows to label (their own labels are ignored).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "libsvm")]
    format: FormatArg,
    #[arg(long = "label-col", default_value_t = 0)]
    label_col: usize,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Share of planted noise rows.
    #[arg(long = "noise-rate", default_value_t = 0.1)]
    noise_rate: f64,
    #[arg(long)]
    out: PathBuf,
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Train(RunConfig),
    Evaluate {
        model: PathBuf,
        test: PathBuf,
        format: Format,
        label_column: usize,
        out: Option<PathBuf>,
    },
    GiniScan(RunConfig),
    Predict {
        model: PathBuf,
        input: PathBuf,
        format: Format,
        label_column: usize,
    },
    Generate {
        kind: SynthKind,
        n: usize,
        seed: u64,
        noise_rate: f64,
        out: PathBuf,
    },
}

fn base_config(input: &InputArgs, filter: &FilterArgs) -> RunConfig {
    let mut cfg = RunConfig::new(&input.train);
    cfg.format = input.format.into();
    cfg.label_column = input.label_col;
    cfg.partitions = input.partitions;
    cfg.seed = input.seed;
    cfg.scaling = !input.no_scale;
    cfg.output_dir = input.out.clone();
    cfg.jobs = input.jobs;
    cfg.nu = filter.nu;
    cfg.kernel = match filter.kernel {
        KernelArg::Rbf => KernelChoice::Rbf { gamma: filter.gamma },
        KernelArg::Linear => KernelChoice::Linear,
    };
    cfg.grid_step = filter.grid_step;
    cfg.tol = filter.tol;
    cfg
}

/// Parses `argv` (program name first). Usage problems come back as clap
/// errors so the caller can print them and exit with clap's code.
pub fn cli_parse<I, T>(argv: I) -> std::result::Result<Command, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    Ok(match cli.command {
        CliCommand::Train(a) => {
            let mut cfg = base_config(&a.input, &a.filter);
            cfg.test_path = a.test;
            cfg.learner = match a.learner {
                LearnerArg::Stump => LearnerParams::Stump,
                LearnerArg::Tree => LearnerParams::RandomTree {
                    max_depth: a.max_depth,
                    k_candidates: a.candidates,
                },
                LearnerArg::Knn => LearnerParams::Knn { k: a.k },
            };
            cfg.rounds = a.rounds;
            cfg.filtering = !a.no_filter;
            cfg.beta_mode = match a.beta_mode {
                BetaArg::Holdout => BetaMode::Holdout,
                BetaArg::Train => BetaMode::Train,
            };
            cfg.repetitions = a.reps;
            Command::Train(cfg)
        }
        CliCommand::GiniScan(a) => Command::GiniScan(base_config(&a.input, &a.filter)),
        CliCommand::Evaluate(a) => Command::Evaluate {
            model: a.model,
            test: a.test,
            format: a.format.into(),
            label_column: a.label_col,
            out: a.out,
        },
        CliCommand::Predict(a) => Command::Predict {
            model: a.model,
            input: a.input,
            format: a.format.into(),
            label_column: a.label_col,
        },
        CliCommand::Generate(a) => Command::Generate {
            kind: a.kind,
            n: a.n,
            seed: a.seed,
            noise_rate: a.noise_rate,
            out: a.out,
        },
    })
}

/// Executes a parsed command, printing its summary to standard output.
pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train(cfg) => {
            let (_, report) = pipeline::run_training(&cfg)?;
            println!(
                "mean accuracy {:.5} (std {:.5}) over {} repetition(s) on {} data; outputs in {}",
                report.mean_accuracy,
                report.std_accuracy,
                report.repetitions.len(),
                report.evaluated_on,
                cfg.output_dir.display()
            );
        }
        Command::Evaluate {
            model,
            test,
            format,
            label_column,
            out,
        } => {
            let eval = pipeline::evaluate(&model, &test, format, label_column)?;
            let text = serde_json::to_string_pretty(&eval)? + "\n";
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("evaluation.json"), &text)?;
            }
            print!("{text}");
        }
        Command::GiniScan(cfg) => {
            let summary = pipeline::gini_scan(&cfg)?;
            print!("{}", summary.render());
        }
        Command::Predict {
            model,
            input,
            format,
            label_column,
        } => {
            for label in pipeline::predict(&model, &input, format, label_column)? {
                println!("{label}");
            }
        }
        Command::Generate {
            kind,
            n,
            seed,
            noise_rate,
            out,
        } => {
            let data = match kind {
                SynthKind::Planted => synth::planted_outliers(n, 1.0 - noise_rate, 3, 0.05, 6.0, seed)?.data,
                SynthKind::TwoClass => synth::noisy_two_class(n, 3.0, noise_rate, 6.0, seed)?.data,
                SynthKind::Xor => synth::xor(n.div_ceil(4))?,
                SynthKind::Uniform => synth::uniform_classes(n.div_ceil(26), 26, 16, seed)?,
            };
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(&out, data.to_libsvm())?;
        }
    }
    Ok(())
}
