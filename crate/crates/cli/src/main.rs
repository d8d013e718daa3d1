use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use phaselearn::bench::{self, BenchConfig, Selection};
use phaselearn::dataset::{self, FeatureMode, GenerateConfig};
use phaselearn::hamiltonian::{exact_ground, EXACT_MAX_QUBITS};
use phaselearn::qcnn::{self, QcnnModel, Sample, TrainConfig};
use phaselearn::threads::with_threads;
use phaselearn::{Error, Model, Result};

/// Learn spin-chain phase boundaries from VQE-prepared ground states.
#[derive(Parser, Debug)]
#[command(name = "phaselearn", version, about)]
struct Cli {
    /// Seed for every random stream in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output path: dataset file for `generate`, directory for `train`,
    /// CSV file for `eval --curve` and `bench` (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a VQE sweep and write a labeled JSONL dataset plus manifest.
    Generate {
        #[arg(long, value_enum, default_value_t = ModelArg::Tfim)]
        model: ModelArg,
        /// Chain length.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Grid points over the coupling window (at least 2).
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
        count: u64,
        /// Checkerboard layers.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Coupling window as `lo,hi`; defaults to the model's symmetric window.
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 2,
            allow_negative_numbers = true
        )]
        window: Option<Vec<f64>>,
        /// Worker threads.
        #[arg(long, env = "PHASELEARN_THREADS")]
        threads: Option<usize>,
    },
    /// Train the hybrid classifier; writes checkpoint.json, metrics.csv and report.json.
    Train {
        /// JSONL dataset produced by `generate`.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 100)]
        epochs: usize,
        /// Add symmetry variants to the training split.
        #[arg(long, value_enum, default_value_t = Switch::Off)]
        augment: Switch,
        /// Random global Z-rotations per XXZ training record when augmenting.
        #[arg(long, default_value_t = 1)]
        rotations: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 16)]
        batch_size: usize,
        /// Width of the first dense layer.
        #[arg(long, default_value_t = 16)]
        hidden: usize,
        /// Extra dense + quantum stages after the first quantum layer.
        #[arg(long, default_value_t = 0)]
        extra_blocks: usize,
        #[arg(long, value_enum, default_value_t = FeatureArg::Correlators)]
        features: FeatureArg,
        /// Worker threads.
        #[arg(long, env = "PHASELEARN_THREADS")]
        threads: Option<usize>,
    },
    /// Evaluate a checkpoint on a dataset.
    Eval {
        /// Checkpoint written by `train`.
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Emit the coupling/probability curve as CSV.
        #[arg(long)]
        curve: bool,
        #[arg(long, value_enum, default_value_t = FeatureArg::Correlators)]
        features: FeatureArg,
        /// Worker threads.
        #[arg(long, env = "PHASELEARN_THREADS")]
        threads: Option<usize>,
    },
    /// Print the exact ground-state energy of a chain.
    Exact {
        #[arg(long, value_enum, default_value_t = ModelArg::Tfim)]
        model: ModelArg,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// `h` for TFIM, `Jz` for XXZ.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        coupling: f64,
    },
    /// Time the VQE and classifier workloads across thread counts.
    Bench {
        #[arg(long, value_enum, default_value_t = WorkloadArg::All)]
        workload: WorkloadArg,
        /// Comma-separated thread counts; must include 1.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1,2,4",
            env = "PHASELEARN_THREADS"
        )]
        threads: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// VQE register size.
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[arg(long, default_value_t = 200)]
        dataset_size: usize,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Tfim,
    Xxz,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Tfim => Model::Tfim,
            ModelArg::Xxz => Model::Xxz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FeatureArg {
    Correlators,
    Probabilities,
}

impl From<FeatureArg> for FeatureMode {
    fn from(f: FeatureArg) -> Self {
        match f {
            FeatureArg::Correlators => FeatureMode::Correlators,
            FeatureArg::Probabilities => FeatureMode::Probabilities,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WorkloadArg {
    Vqe,
    Qcnn,
    All,
}

/// Maximum tolerated fraction of failed VQE runs in `generate`.
const MAX_FAILURE_RATE: f64 = 0.2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    check_usage(&cli);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Usage checks clap cannot express; exits with status 2 on failure.
fn check_usage(cli: &Cli) {
    let fail = |kind, msg: &str| Cli::command().error(kind, msg).exit();
    match &cli.command {
        Command::Bench { threads, .. } => {
            if threads.contains(&0) {
                fail(
                    ErrorKind::ValueValidation,
                    "--threads entries must be at least 1",
                );
            }
            if !threads.contains(&1) {
                fail(
                    ErrorKind::ValueValidation,
                    "--threads must include 1 as the speedup baseline",
                );
            }
        }
        Command::Generate {
            window: Some(w), ..
        } if w[0].is_nan() || w[1].is_nan() || w[0] >= w[1] => {
            fail(ErrorKind::ValueValidation, "--window needs lo < hi")
        }
        Command::Generate {
            threads: Some(0), ..
        }
        | Command::Train {
            threads: Some(0), ..
        }
        | Command::Eval {
            threads: Some(0), ..
        } => fail(ErrorKind::ValueValidation, "--threads must be at least 1"),
        _ => {}
    }
}

fn pooled<R: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match threads {
        Some(t) => with_threads(t, f)?,
        None => f(),
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Generate {
            model,
            n,
            count,
            depth,
            window,
            threads,
        } => {
            let model = Model::from(model);
            let mut config = GenerateConfig::new(model, n, count as usize, depth, seed);
            if let Some(w) = window {
                config.window = (w[0], w[1]);
            }
            let out = cli
                .out
                .unwrap_or_else(|| PathBuf::from(format!("{model}.jsonl")));
            cmd_generate(&config, &out, threads)
        }
        Command::Train {
            data,
            epochs,
            augment,
            rotations,
            lr,
            batch_size,
            hidden,
            extra_blocks,
            features,
            threads,
        } => {
            let config = TrainConfig {
                epochs,
                learning_rate: lr,
                batch_size,
                seed,
                hidden,
                extra_blocks,
                augment: augment == Switch::On,
                augment_rotations: rotations,
                feature_mode: features.into(),
                ..Default::default()
            };
            let out = cli.out.unwrap_or_else(|| PathBuf::from("run"));
            pooled(threads, || cmd_train(&data, &config, &out))
        }
        Command::Eval {
            model_file,
            data,
            curve,
            features,
            threads,
        } => pooled(threads, || {
            cmd_eval(
                &model_file,
                &data,
                curve,
                features.into(),
                cli.out.as_deref(),
            )
        }),
        Command::Exact { model, n, coupling } => {
            if n > EXACT_MAX_QUBITS {
                return Err(Error::Size(format!(
                    "exact diagonalization supports at most {EXACT_MAX_QUBITS} sites, got {n}"
                )));
            }
            let ham = Model::from(model).hamiltonian(n, coupling)?;
            println!("{}", significant(exact_ground(&ham)?.energy, 12));
            Ok(())
        }
        Command::Bench {
            workload,
            threads,
            repetitions,
            n,
            depth,
            iters,
            dataset_size,
            epochs,
        } => {
            let config = BenchConfig {
                n_qubits: n,
                depth,
                vqe_iters: iters,
                dataset_size,
                epochs,
                repetitions,
                seed,
            };
            let selection = match workload {
                WorkloadArg::Vqe => Selection {
                    vqe: true,
                    qcnn: false,
                },
                WorkloadArg::Qcnn => Selection {
                    vqe: false,
                    qcnn: true,
                },
                WorkloadArg::All => Selection::ALL,
            };
            let results = bench::run_benchmarks(selection, &threads, &config)?;
            emit(
                cli.out.as_deref(),
                &bench::speedup_report(&results, &config)?,
            )
        }
    }
}

fn cmd_generate(config: &GenerateConfig, out: &Path, threads: Option<usize>) -> Result<()> {
    let manifest = pooled(threads, || dataset::generate_to_file(config, out))?;
    let records = dataset::read_jsonl(out)?;
    let ones = records.iter().filter(|r| r.label == 1).count();
    println!(
        "wrote {} records to {} ({} converged, {} excluded)",
        manifest.records_written,
        out.display(),
        manifest.converged,
        manifest.exclusions.len()
    );
    println!(
        "class balance: {} label 0, {ones} label 1",
        records.len() - ones
    );
    let rate = manifest.failure_rate();
    if rate > MAX_FAILURE_RATE {
        return Err(Error::Argument(format!(
            "{:.0}% of VQE runs failed; see {}",
            rate * 100.0,
            dataset::manifest_path(out).display()
        )));
    }
    Ok(())
}

fn read_data(path: &Path) -> Result<Vec<dataset::SampleRecord>> {
    dataset::read_jsonl(path).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn cmd_train(data: &Path, config: &TrainConfig, out: &Path) -> Result<()> {
    let records = read_data(data)?;
    let (model, report) = qcnn::train(&records, config)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    model.save(&out.join("checkpoint.json"))?;
    qcnn::write_metrics_csv(&out.join("metrics.csv"), &report)?;
    qcnn::write_report(&out.join("report.json"), &report)?;
    println!(
        "train {} (raw {}), test {}: test accuracy {:.4}",
        report.train_size, report.raw_train_size, report.test_size, report.test_accuracy
    );
    println!("artifacts in {}", out.display());
    Ok(())
}

fn cmd_eval(
    model_file: &Path,
    data: &Path,
    curve: bool,
    mode: FeatureMode,
    out: Option<&Path>,
) -> Result<()> {
    let model = QcnnModel::load(model_file)?;
    let records = read_data(data)?;
    let samples = records
        .iter()
        .map(|r| Sample::from_record(r, mode))
        .collect::<Result<Vec<_>>>()?;
    if let Some(s) = samples.first() {
        if s.features.len() != model.feature_len {
            return Err(Error::Argument(format!(
                "checkpoint expects {} features but the data yields {}",
                model.feature_len,
                s.features.len()
            )));
        }
    }
    let eval = qcnn::evaluate(&model, &samples, TrainConfig::default().threshold)?;
    let crossing = eval.crossing(0.5);
    let mut summary = format!("accuracy {:.6}\n", eval.accuracy);
    summary.push_str(&match crossing {
        Some(c) => format!("crossing {c:.6}\n"),
        None => "crossing none\n".to_string(),
    });
    if !curve {
        print!("{summary}");
        return Ok(());
    }
    let mut csv = String::from("coupling,probability,label\n");
    for p in &eval.curve {
        csv.push_str(&format!("{},{},{}\n", p.coupling, p.probability, p.label));
    }
    emit(out, &csv)?;
    // keep stdout clean for the CSV when it goes there
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

/// Fixed-point rendering of `v` with `digits` significant digits.
fn significant(v: f64, digits: usize) -> String {
    let magnitude = if v == 0.0 {
        0
    } else {
        v.abs().log10().floor() as i64
    };
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
