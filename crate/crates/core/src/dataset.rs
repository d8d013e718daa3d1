//! Labeled ground-state datasets.
//!
//! Records keep only the ansatz descriptor and its parameters; states are
//! rebuilt on demand by re-running the circuit and then any symmetry
//! operations listed in the record's augmentation chain.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_checkerboard, AnsatzDescriptor};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Pauli, PauliString};
use crate::model::Model;
use crate::statevector::{Gate, StateVector};
use crate::vqe::{sweep_each, OptimizerConfig};

pub const GENERATOR_VERSION: &str = concat!("phaselearn ", env!("CARGO_PKG_VERSION"));

/// Symmetry operation appended to a reconstructed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum SymmetryOp {
    /// `X` on every qubit.
    Flip,
    /// Site order reversal `i -> n-1-i`.
    Reflect,
    /// `RZ(phi)` on every qubit.
    Rz { phi: f64 },
}

impl SymmetryOp {
    pub fn gates(&self, n: usize) -> Vec<Gate> {
        match *self {
            SymmetryOp::Flip => (0..n).map(Gate::X).collect(),
            SymmetryOp::Rz { phi } => (0..n).map(|q| Gate::Rz(q, phi)).collect(),
            SymmetryOp::Reflect => (0..n / 2)
                .flat_map(|i| {
                    let (a, b) = (i, n - 1 - i);
                    [
                        Gate::Cnot {
                            control: a,
                            target: b,
                        },
                        Gate::Cnot {
                            control: b,
                            target: a,
                        },
                        Gate::Cnot {
                            control: a,
                            target: b,
                        },
                    ]
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub model: Model,
    pub n: usize,
    pub coupling: f64,
    pub ansatz: AnsatzDescriptor,
    pub theta: Vec<f64>,
    pub label: u8,
    pub seed: u64,
    /// Symmetry operations applied after the circuit, in order.
    pub augmentation: Option<Vec<SymmetryOp>>,
}

impl SampleRecord {
    pub fn validate(&self) -> Result<()> {
        if self.ansatz.n != self.n {
            return Err(Error::Shape {
                expected: self.n,
                actual: self.ansatz.n,
            });
        }
        let ansatz = self.ansatz.build()?;
        if self.theta.len() != ansatz.n_params() {
            return Err(Error::Shape {
                expected: ansatz.n_params(),
                actual: self.theta.len(),
            });
        }
        if self.label > 1 {
            return Err(Error::Domain(format!("label {} is not 0 or 1", self.label)));
        }
        if !self.coupling.is_finite() {
            return Err(Error::Domain("non-finite coupling".into()));
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        self.model.hamiltonian(self.n, self.coupling)
    }

    /// Rebuilds the stored state: circuit on `|0...0>`, then the augmentation chain.
    pub fn reconstruct_state(&self) -> Result<StateVector> {
        let ansatz = self.ansatz.build()?;
        let mut state = ansatz.prepare_state(&self.theta)?;
        for op in self.augmentation.iter().flatten() {
            for g in op.gates(self.n) {
                state.apply_gate(&g)?;
            }
        }
        Ok(state)
    }

    fn with_op(&self, op: SymmetryOp) -> SampleRecord {
        let mut chain = self.augmentation.clone().unwrap_or_default();
        chain.push(op);
        SampleRecord {
            augmentation: Some(chain),
            ..self.clone()
        }
    }
}

/// Phase label from the analytic boundary: 1 for the disordered (TFIM, `h > 1`)
/// or planar (XXZ, `|Jz| < 1`) phase, 0 otherwise.
pub fn assign_label(model: Model, coupling: f64) -> Result<u8> {
    if !coupling.is_finite() {
        return Err(Error::Domain("non-finite coupling".into()));
    }
    match model {
        Model::Tfim if coupling == 1.0 => Err(Error::Boundary { coupling }),
        Model::Tfim => Ok(u8::from(coupling > 1.0)),
        Model::Xxz if coupling.abs() == 1.0 => Err(Error::Boundary { coupling }),
        Model::Xxz => Ok(u8::from(coupling.abs() < 1.0)),
    }
}

/// The record itself followed by its symmetry variants: spin flip and
/// reflection for both models, plus `rotations` global Z-rotations with
/// angles drawn uniformly from `[0, 2π)` for XXZ.
pub fn augment<R: Rng + ?Sized>(
    record: &SampleRecord,
    rotations: usize,
    rng: &mut R,
) -> Vec<SampleRecord> {
    let mut out = vec![
        record.clone(),
        record.with_op(SymmetryOp::Flip),
        record.with_op(SymmetryOp::Reflect),
    ];
    if record.model == Model::Xxz {
        for _ in 0..rotations {
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            out.push(record.with_op(SymmetryOp::Rz { phi }));
        }
    }
    out
}

/// How a state is turned into classifier input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// Local and nearest-neighbour Pauli expectations.
    #[default]
    Correlators,
    /// All `2^n` basis probabilities.
    Probabilities,
}

pub fn feature_len(model: Model, n: usize, mode: FeatureMode) -> usize {
    match (mode, model) {
        (FeatureMode::Probabilities, _) => 1 << n,
        (FeatureMode::Correlators, Model::Tfim) => 3 * n - 1,
        (FeatureMode::Correlators, Model::Xxz) => 4 * n - 2,
    }
}

/// Default correlator features.
///
/// TFIM: `<X_i>`, `<Z_i>`, `<Z_i Z_i+1>`. XXZ: `<Z_i>`, `<Z_i Z_i+1>`,
/// `<X_i X_i+1>`, `<Y_i Y_i+1>`.
pub fn extract_features(state: &StateVector, model: Model) -> Vec<f64> {
    extract_features_with(state, model, FeatureMode::Correlators)
}

pub fn extract_features_with(state: &StateVector, model: Model, mode: FeatureMode) -> Vec<f64> {
    let n = state.n_qubits();
    if mode == FeatureMode::Probabilities {
        return state.probabilities();
    }
    let local = |p: Pauli| (0..n).map(move |q| PauliString::from_sparse(n, &[(q, p)]));
    let bond =
        |p: Pauli| (0..n - 1).map(move |q| PauliString::from_sparse(n, &[(q, p), (q + 1, p)]));
    let strings: Vec<PauliString> = match model {
        Model::Tfim => local(Pauli::X)
            .chain(local(Pauli::Z))
            .chain(bond(Pauli::Z))
            .collect(),
        Model::Xxz => local(Pauli::Z)
            .chain(bond(Pauli::Z))
            .chain(bond(Pauli::X))
            .chain(bond(Pauli::Y))
            .collect(),
    };
    strings
        .iter()
        .map(|s| {
            state
                .pauli_expectation(s)
                .expect("strings built for this register")
                .clamp(-1.0, 1.0)
        })
        .collect()
}

/// `count` evenly spaced points over `[lo, hi]`, both ends included.
pub fn coupling_grid(window: (f64, f64), count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::Argument(format!(
            "grid needs at least 2 points, got {count}"
        )));
    }
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Argument(format!("invalid window [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub model: Model,
    pub n: usize,
    pub count: usize,
    pub depth: usize,
    pub seed: u64,
    pub window: (f64, f64),
    pub vqe: OptimizerConfig,
}

impl GenerateConfig {
    pub fn new(model: Model, n: usize, count: usize, depth: usize, seed: u64) -> Self {
        Self {
            model,
            n,
            count,
            depth,
            seed,
            window: model.default_window(),
            vqe: OptimizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub index: usize,
    pub coupling: f64,
    pub reason: String,
}

/// Sidecar describing how a dataset file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator_version: String,
    pub model: Model,
    pub n: usize,
    pub depth: usize,
    pub scheme: String,
    pub count: usize,
    pub window: [f64; 2],
    pub grid: Vec<f64>,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub records_written: usize,
    pub converged: usize,
    pub exclusions: Vec<Exclusion>,
}

impl Manifest {
    /// Fraction of non-boundary grid points whose VQE run failed.
    pub fn failure_rate(&self) -> f64 {
        let failed = self
            .exclusions
            .iter()
            .filter(|e| e.reason != "boundary")
            .count();
        let attempted = failed + self.records_written;
        if attempted == 0 {
            0.0
        } else {
            failed as f64 / attempted as f64
        }
    }
}

/// Runs the VQE sweep for `config` and passes each finished record to
/// `on_record` in grid order.
pub fn generate_with<F>(config: &GenerateConfig, mut on_record: F) -> Result<Manifest>
where
    F: FnMut(&SampleRecord) -> Result<()>,
{
    let model = config.model;
    let grid = coupling_grid(config.window, config.count)?;
    let ansatz = build_checkerboard(config.n, config.depth)?;
    let critical = model.critical_coupling();

    let mut exclusions = Vec::new();
    let mut kept = Vec::new();
    for (index, &c) in grid.iter().enumerate() {
        if (c - critical).abs() < 1e-9 {
            exclusions.push(Exclusion {
                index,
                coupling: c,
                reason: "boundary".into(),
            });
        } else {
            kept.push((index, c));
        }
    }
    let couplings: Vec<f64> = kept.iter().map(|&(_, c)| c).collect();

    let mut written = 0;
    let mut converged = 0;
    let vqe = config.vqe.with_seed(config.seed);
    if !couplings.is_empty() {
        sweep_each(model, config.n, &couplings, config.depth, &vqe, |entry| {
            let (index, coupling) = kept[entry.index];
            match entry.outcome {
                Ok(result) => {
                    converged += usize::from(result.converged);
                    let record = SampleRecord {
                        model,
                        n: config.n,
                        coupling,
                        ansatz: ansatz.descriptor(),
                        theta: result.theta_opt,
                        label: assign_label(model, coupling)?,
                        seed: entry.seed,
                        augmentation: None,
                    };
                    on_record(&record)?;
                    written += 1;
                }
                Err(e) => exclusions.push(Exclusion {
                    index,
                    coupling,
                    reason: e.to_string(),
                }),
            }
            Ok(())
        })?;
    }
    exclusions.sort_by_key(|e| e.index);

    Ok(Manifest {
        generator_version: GENERATOR_VERSION.into(),
        model,
        n: config.n,
        depth: config.depth,
        scheme: ansatz.descriptor().scheme,
        count: config.count,
        window: [config.window.0, config.window.1],
        grid,
        seed: config.seed,
        optimizer: vqe,
        records_written: written,
        converged,
        exclusions,
    })
}

/// In-memory dataset generation.
pub fn generate_dataset(config: &GenerateConfig) -> Result<(Vec<SampleRecord>, Manifest)> {
    let mut records = Vec::with_capacity(config.count);
    let manifest = generate_with(config, |r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok((records, manifest))
}

/// Sidecar path for a dataset file: `data.jsonl` -> `data.manifest.json`.
pub fn manifest_path(data_path: &Path) -> PathBuf {
    data_path.with_extension("manifest.json")
}

/// Generates straight to disk, flushing after every record.
pub fn generate_to_file(config: &GenerateConfig, path: &Path) -> Result<Manifest> {
    let mut writer = JsonlWriter::create(path)?;
    let manifest = generate_with(config, |r| writer.write(r))?;
    write_json(&manifest_path(path), &manifest)?;
    Ok(manifest)
}

pub struct JsonlWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn write(&mut self, record: &SampleRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out
            .write_all(b"\n")
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

pub fn write_jsonl(path: &Path, records: &[SampleRecord]) -> Result<()> {
    let mut w = JsonlWriter::create(path)?;
    records.iter().try_for_each(|r| w.write(r))
}

/// Reads and validates a JSONL dataset; blank lines are skipped.
pub fn read_jsonl(path: &Path) -> Result<Vec<SampleRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let record: SampleRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        record.validate().map_err(|e| parse_err(e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Shuffles with `seed` and splits into `(train, test)`.
///
/// The test part holds `floor(len * (1 - fraction))` items.
pub fn split<T: Clone>(items: &[T], fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if items.is_empty() {
        return Err(Error::Argument("cannot split an empty dataset".into()));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Argument(format!(
            "split fraction {fraction} outside (0, 1)"
        )));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test_len = ((items.len() as f64) * (1.0 - fraction) + 1e-9).floor() as usize;
    let train_len = items.len() - test_len;
    let pick = |idx: &[usize]| idx.iter().map(|&i| items[i].clone()).collect::<Vec<T>>();
    Ok((pick(&order[..train_len]), pick(&order[train_len..])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_checkerboard;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn record(model: Model, n: usize, coupling: f64, seed: u64) -> SampleRecord {
        let a = build_checkerboard(n, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SampleRecord {
            model,
            n,
            coupling,
            ansatz: a.descriptor(),
            theta: (0..a.n_params())
                .map(|_| rng.random_range(-3.0..3.0))
                .collect(),
            label: assign_label(model, coupling).unwrap(),
            seed,
            augmentation: None,
        }
    }

    #[test]
    fn labels() {
        assert_eq!(assign_label(Model::Tfim, 0.5).unwrap(), 0);
        assert_eq!(assign_label(Model::Tfim, 1.5).unwrap(), 1);
        assert_eq!(assign_label(Model::Xxz, -1.5).unwrap(), 0);
        assert_eq!(assign_label(Model::Xxz, -0.5).unwrap(), 1);
        assert!(matches!(
            assign_label(Model::Tfim, 1.0),
            Err(Error::Boundary { .. })
        ));
        assert!(matches!(
            assign_label(Model::Xxz, -1.0),
            Err(Error::Boundary { .. })
        ));
    }

    #[test]
    fn augmentation_counts_and_tags() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = record(Model::Tfim, 4, 0.7, 1);
        let out = augment(&t, 3, &mut rng);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], t);
        assert_eq!(out[1].augmentation, Some(vec![SymmetryOp::Flip]));
        assert_eq!(out[2].augmentation, Some(vec![SymmetryOp::Reflect]));
        assert!(out.iter().all(|r| r.label == t.label && r.theta == t.theta));

        let x = record(Model::Xxz, 4, -0.7, 2);
        let out = augment(&x, 3, &mut rng);
        assert_eq!(out.len(), 6);
        assert!(out[3..]
            .iter()
            .all(|r| matches!(r.augmentation.as_deref(), Some([SymmetryOp::Rz { phi }]) if (0.0..std::f64::consts::TAU).contains(phi))));

        let again = augment(&out[1], 0, &mut rng);
        assert_eq!(
            again[2].augmentation,
            Some(vec![SymmetryOp::Flip, SymmetryOp::Reflect])
        );
    }

    #[test]
    fn reflection_reverses_sites() {
        let n = 5;
        let mut s = StateVector::new_zero(n).unwrap();
        s.apply_gate(&Gate::X(0)).unwrap();
        s.apply_gate(&Gate::X(1)).unwrap();
        for g in SymmetryOp::Reflect.gates(n) {
            s.apply_gate(&g).unwrap();
        }
        // 0b00011 -> 0b11000
        assert_eq!(s.probabilities()[0b11000], 1.0);
    }

    #[test]
    fn features_of_simple_states() {
        let s = StateVector::new_zero(3).unwrap();
        assert_eq!(
            extract_features(&s, Model::Tfim),
            vec![0., 0., 0., 1., 1., 1., 1., 1.]
        );

        let h = FRAC_1_SQRT_2;
        let c = |x: f64| crate::statevector::C64::new(x, 0.0);
        let bell = StateVector::from_amplitudes(vec![c(0.), c(h), c(h), c(0.)]).unwrap();
        let f = extract_features(&bell, Model::Xxz);
        let expect = [0.0, 0.0, -1.0, 1.0, 1.0];
        assert_eq!(f.len(), 5);
        assert!(
            f.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12),
            "{f:?}"
        );

        assert_eq!(feature_len(Model::Tfim, 8, FeatureMode::Correlators), 23);
        assert_eq!(feature_len(Model::Xxz, 8, FeatureMode::Correlators), 30);
        let p = extract_features_with(&bell, Model::Xxz, FeatureMode::Probabilities);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn grid_and_split_rules() {
        assert!(matches!(
            coupling_grid((0.2, 1.8), 1),
            Err(Error::Argument(_))
        ));
        let g = coupling_grid((0.2, 1.8), 100).unwrap();
        assert_eq!(g.len(), 100);
        assert!(g.iter().all(|&h| (h - 1.0).abs() > 1e-3));
        let below = g.iter().filter(|&&h| h < 1.0).count();
        assert_eq!(below, 50);

        let items: Vec<usize> = (0..100).collect();
        let (tr, te) = split(&items, 0.8, 4).unwrap();
        assert_eq!((tr.len(), te.len()), (80, 20));
        let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert_eq!(split(&items, 0.8, 4).unwrap(), (tr, te));

        let five: Vec<usize> = (0..5).collect();
        let (tr, te) = split(&five, 0.8, 0).unwrap();
        assert_eq!((tr.len(), te.len()), (4, 1));

        let empty: Vec<usize> = vec![];
        assert!(matches!(split(&empty, 0.8, 0), Err(Error::Argument(_))));
        assert!(matches!(split(&five, 1.0, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn record_validation() {
        let mut r = record(Model::Tfim, 4, 0.3, 0);
        assert!(r.validate().is_ok());
        r.theta.pop();
        assert!(matches!(r.validate(), Err(Error::Shape { .. })));
        let mut r = record(Model::Tfim, 4, 0.3, 0);
        r.label = 2;
        assert!(r.validate().is_err());
    }
}
