//! Variational ground-state search and coupling sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_checkerboard, CheckerboardAnsatz};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::model::Model;
use crate::optim::{Optimizer, OptimizerState};

/// Standard deviation of the initial parameter draw.
pub const INIT_STD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop once the gradient max-norm falls to this value.
    pub grad_tolerance: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            max_iters: 500,
            grad_tolerance: 1e-4,
            seed: 0,
            optimizer: Optimizer::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.grad_tolerance.is_nan() || self.grad_tolerance < 0.0 {
            return Err(Error::Config("grad_tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub theta_opt: Vec<f64>,
    pub final_energy: f64,
    pub energy_history: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

/// Initial parameters: i.i.d. `N(0, 0.1)` from a ChaCha8 stream seeded with `seed`.
pub fn initial_parameters(n_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, INIT_STD).expect("valid normal");
    (0..n_params).map(|_| normal.sample(&mut rng)).collect()
}

/// Minimizes `<psi(θ)|H|psi(θ)>` with parameter-shift gradients.
///
/// Each iteration records the energy at the current `θ`; the loop stops when
/// the gradient max-norm reaches `grad_tolerance` or after `max_iters`
/// evaluations. `theta_opt` is the last evaluated point, so `final_energy`
/// always corresponds to it.
pub fn run_vqe(
    ansatz: &CheckerboardAnsatz,
    ham: &Hamiltonian,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    config.validate()?;
    if ham.n_qubits() != ansatz.n_qubits() {
        return Err(Error::Shape {
            expected: ansatz.n_qubits(),
            actual: ham.n_qubits(),
        });
    }
    let mut theta = initial_parameters(ansatz.n_params(), config.seed);
    let mut opt = OptimizerState::new(config.optimizer, theta.len());
    let mut history = Vec::with_capacity(config.max_iters);
    let mut converged = false;

    for iter in 0..config.max_iters {
        let (energy, grad) = ansatz.energy_and_gradient(&theta, ham)?;
        if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Divergence { iteration: iter });
        }
        history.push(energy);
        let max_grad = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        if max_grad <= config.grad_tolerance {
            converged = true;
            break;
        }
        if iter + 1 < config.max_iters {
            opt.step(&mut theta, &grad, config.learning_rate);
        }
    }

    Ok(VqeResult {
        final_energy: *history.last().expect("at least one iteration"),
        iterations_used: history.len(),
        energy_history: history,
        converged,
        theta_opt: theta,
    })
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the run at grid position `index`: `seed XOR mix64(index)`.
pub fn run_seed(seed: u64, index: usize) -> u64 {
    seed ^ mix64(index as u64)
}

#[derive(Debug)]
pub struct SweepEntry {
    pub index: usize,
    pub coupling: f64,
    pub seed: u64,
    pub outcome: Result<VqeResult>,
}

#[derive(Debug)]
pub struct Sweep {
    pub entries: Vec<SweepEntry>,
}

impl Sweep {
    pub fn failures(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| e.outcome.is_err())
    }

    pub fn converged_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(&e.outcome, Ok(r) if r.converged))
            .count()
    }
}

/// One VQE per coupling; see [`sweep_each`] for the streaming form.
pub fn sweep(
    model: Model,
    n: usize,
    couplings: &[f64],
    depth: usize,
    config: &OptimizerConfig,
) -> Result<Sweep> {
    let mut entries = Vec::with_capacity(couplings.len());
    sweep_each(model, n, couplings, depth, config, |e| {
        entries.push(e);
        Ok(())
    })?;
    Ok(Sweep { entries })
}

/// Runs the sweep in parallel batches and hands entries to `on_entry` in
/// coupling-index order as each batch completes.
///
/// A diverging run is reported through its entry and does not stop the sweep.
pub fn sweep_each<F>(
    model: Model,
    n: usize,
    couplings: &[f64],
    depth: usize,
    config: &OptimizerConfig,
    mut on_entry: F,
) -> Result<()>
where
    F: FnMut(SweepEntry) -> Result<()>,
{
    if couplings.is_empty() {
        return Err(Error::Argument("sweep needs at least one coupling".into()));
    }
    config.validate()?;
    for &c in couplings {
        model.check_coupling(c)?;
    }
    let ansatz = build_checkerboard(n, depth)?;
    let batch = 2 * rayon::current_num_threads().max(1);
    let indexed: Vec<(usize, f64)> = couplings.iter().copied().enumerate().collect();
    for chunk in indexed.chunks(batch) {
        let done: Vec<SweepEntry> = chunk
            .par_iter()
            .map(|&(index, coupling)| {
                let seed = run_seed(config.seed, index);
                let outcome = model
                    .hamiltonian(n, coupling)
                    .and_then(|ham| run_vqe(&ansatz, &ham, &config.with_seed(seed)));
                SweepEntry {
                    index,
                    coupling,
                    seed,
                    outcome,
                }
            })
            .collect();
        for entry in done {
            on_entry(entry)?;
        }
    }
    Ok(())
}
