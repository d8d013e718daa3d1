//! Thread-scaling benchmarks for the VQE and classifier workloads.
//!
//! Every workload performs a fixed amount of work (fixed iteration and epoch
//! counts, no early stopping), so runs at different thread counts do the same
//! arithmetic and must produce identical numbers. Timings are the median of
//! the timed repetitions after one discarded warmup run.
//!
//! The harness should be the only active workload on the machine while it
//! measures.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::build_checkerboard;
use crate::error::{Error, Result};
use crate::hamiltonian::build_tfim;
use crate::qcnn::{train_samples, Sample, TrainConfig};
use crate::threads::with_threads;
use crate::vqe::{run_vqe, OptimizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Workload {
    #[serde(rename = "VQE16")]
    Vqe16,
    #[serde(rename = "QCNN")]
    Qcnn,
    #[serde(rename = "TOTAL")]
    Total,
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Workload::Vqe16 => "VQE16",
            Workload::Qcnn => "QCNN",
            Workload::Total => "TOTAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub vqe_iters: usize,
    pub dataset_size: usize,
    pub epochs: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_qubits: 16,
            depth: 2,
            vqe_iters: 20,
            dataset_size: 200,
            epochs: 5,
            repetitions: 5,
            seed: 0,
        }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 || self.vqe_iters == 0 || self.epochs == 0 || self.dataset_size < 2
        {
            return Err(Error::Config(
                "benchmark repetitions, iterations and epochs must be positive and the dataset needs 2+ samples"
                    .into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub workload: Workload,
    pub threads: usize,
    /// Median wall time in seconds.
    pub wall_time: f64,
    pub speedup_vs_1thread: f64,
    /// Result of the workload (final VQE energy or final training loss);
    /// must not depend on the thread count.
    pub checksum: f64,
}

/// Median time and result of `repetitions` runs after a warmup.
fn measure<F>(threads: usize, repetitions: usize, work: F) -> Result<(f64, f64)>
where
    F: Fn() -> Result<f64> + Send + Sync,
{
    with_threads(threads, || -> Result<(f64, f64)> {
        let reference = work()?;
        let mut times = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let start = Instant::now();
            let value = work()?;
            times.push(start.elapsed().as_secs_f64());
            if value.to_bits() != reference.to_bits() {
                return Err(Error::Argument(format!(
                    "workload is not repeatable: {value} vs {reference}"
                )));
            }
        }
        times.sort_by(f64::total_cmp);
        Ok((times[times.len() / 2], reference))
    })?
}

/// Fixed-iteration VQE on an `n_qubits` TFIM chain at the critical field.
pub fn bench_vqe(threads: usize, config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    let ham = build_tfim(config.n_qubits, 1.0, 1.0)?;
    let ansatz = build_checkerboard(config.n_qubits, config.depth)?;
    let opt = OptimizerConfig {
        max_iters: config.vqe_iters,
        grad_tolerance: 0.0,
        seed: config.seed,
        ..Default::default()
    };
    let (wall_time, checksum) = measure(threads, config.repetitions, || {
        Ok(run_vqe(&ansatz, &ham, &opt)?.final_energy)
    })?;
    Ok(BenchResult {
        workload: Workload::Vqe16,
        threads,
        wall_time,
        speedup_vs_1thread: f64::NAN,
        checksum,
    })
}

/// Synthetic classifier inputs shaped like 8-site TFIM correlator features:
/// couplings on an even grid over `[0.2, 1.8]`, label set above 1, features
/// drifting with the coupling plus seeded noise.
pub fn synthetic_samples(count: usize, seed: u64) -> Vec<Sample> {
    const LEN: usize = 23;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let coupling = 0.2 + 1.6 * i as f64 / (count.max(2) - 1) as f64;
            let order = (1.0 - coupling).tanh();
            let features = (0..LEN)
                .map(|k| {
                    let base = if k % 2 == 0 { order } else { -0.5 * order };
                    (base + rng.random_range(-0.2..0.2)).clamp(-1.0, 1.0)
                })
                .collect();
            Sample {
                features,
                label: u8::from(coupling > 1.0),
                coupling,
            }
        })
        .collect()
}

/// Classifier training on synthetic samples for a fixed number of epochs.
pub fn bench_qcnn(threads: usize, config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    let samples = synthetic_samples(config.dataset_size, config.seed);
    let train_cfg = TrainConfig {
        epochs: config.epochs,
        seed: config.seed,
        ..Default::default()
    };
    let (wall_time, checksum) = measure(threads, config.repetitions, || {
        let (_, report) = train_samples(&samples, &[], &train_cfg)?;
        Ok(*report.loss_history.last().expect("at least one epoch"))
    })?;
    Ok(BenchResult {
        workload: Workload::Qcnn,
        threads,
        wall_time,
        speedup_vs_1thread: f64::NAN,
        checksum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub vqe: bool,
    pub qcnn: bool,
}

impl Selection {
    pub const ALL: Selection = Selection {
        vqe: true,
        qcnn: true,
    };
}

/// Runs the selected workloads at every thread count and fills in speedups.
/// A `TOTAL` row per thread count is added when both workloads run.
pub fn run_benchmarks(
    selection: Selection,
    threads: &[usize],
    config: &BenchConfig,
) -> Result<Vec<BenchResult>> {
    if !threads.contains(&1) {
        return Err(Error::Argument(
            "thread list must include 1 as the baseline".into(),
        ));
    }
    if threads.contains(&0) {
        return Err(Error::Argument("thread count must be at least 1".into()));
    }
    let mut results = Vec::new();
    for &t in threads {
        let vqe = selection.vqe.then(|| bench_vqe(t, config)).transpose()?;
        let qcnn = selection.qcnn.then(|| bench_qcnn(t, config)).transpose()?;
        if let (Some(v), Some(q)) = (&vqe, &qcnn) {
            results.push(BenchResult {
                workload: Workload::Total,
                threads: t,
                wall_time: v.wall_time + q.wall_time,
                speedup_vs_1thread: f64::NAN,
                checksum: v.checksum + q.checksum,
            });
        }
        results.extend(vqe);
        results.extend(qcnn);
    }
    fill_speedups(&mut results)?;
    results.sort_by_key(|r| (workload_rank(r.workload), r.threads));
    Ok(results)
}

fn workload_rank(w: Workload) -> u8 {
    match w {
        Workload::Vqe16 => 0,
        Workload::Qcnn => 1,
        Workload::Total => 2,
    }
}

fn baseline(results: &[BenchResult], workload: Workload) -> Result<f64> {
    results
        .iter()
        .find(|r| r.workload == workload && r.threads == 1)
        .map(|r| r.wall_time)
        .ok_or_else(|| Error::Argument(format!("no single-thread baseline for {workload}")))
}

/// Sets `speedup_vs_1thread = time(1) / time(T)` on every row.
pub fn fill_speedups(results: &mut [BenchResult]) -> Result<()> {
    let bases: Vec<f64> = results
        .iter()
        .map(|r| baseline(results, r.workload))
        .collect::<Result<_>>()?;
    for (r, base) in results.iter_mut().zip(bases) {
        r.speedup_vs_1thread = if r.threads == 1 {
            1.0
        } else {
            base / r.wall_time
        };
    }
    Ok(())
}

/// Smallest non-zero step observed between consecutive clock reads.
pub fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..1000 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

/// CSV with a `#` comment header, one row per result, and the ideal linear
/// speedup with the resulting efficiency.
pub fn speedup_report(results: &[BenchResult], config: &BenchConfig) -> Result<String> {
    for r in results {
        baseline(results, r.workload)?;
    }
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut out = String::new();
    let _ = writeln!(out, "# logical_cores={cores}");
    let _ = writeln!(
        out,
        "# timer=monotonic resolution_ns={}",
        timer_resolution().as_nanos()
    );
    let _ = writeln!(
        out,
        "# vqe: tfim n={} depth={} iterations={}; qcnn: synthetic samples={} epochs={}; median of {} after 1 warmup",
        config.n_qubits, config.depth, config.vqe_iters, config.dataset_size, config.epochs, config.repetitions
    );
    let mut worst: Option<(f64, &BenchResult)> = None;
    let mut rows = String::new();
    rows.push_str("workload,threads,wall_time,speedup,ideal_speedup,efficiency\n");
    for r in results {
        let base = baseline(results, r.workload)?;
        let speedup = if r.threads == 1 {
            1.0
        } else {
            base / r.wall_time
        };
        let efficiency = speedup / r.threads as f64;
        let _ = writeln!(
            rows,
            "{},{},{:.6},{:.4},{},{:.4}",
            r.workload, r.threads, r.wall_time, speedup, r.threads, efficiency
        );
        if worst.is_none_or(|(e, _)| efficiency < e) {
            worst = Some((efficiency, r));
        }
    }
    if let Some((e, r)) = worst {
        let _ = writeln!(
            out,
            "# lowest efficiency {:.3} ({} at {} threads); ideal scaling is 1.0",
            e, r.workload, r.threads
        );
    }
    out.push_str(&rows);
    Ok(out)
}
