//! Hybrid convolutional / quantum-circuit binary classifier.
//!
//! Forward pass for a feature vector of length `L`:
//!
//! ```text
//! conv1d(30 kernels of length L) -> ReLU -> max-pool(1) -> fc1(30 -> H) -> ReLU
//!   -> fc2(H -> 3) -> quantum layer (3 qubits, 7 outputs)
//!   -> [optional extra blocks: dense(7 -> 3) -> quantum layer]
//!   -> dropout -> fc3(7 -> 1) -> sigmoid
//! ```
//!
//! Because the kernel spans the whole input, each convolution channel emits a
//! single value and the convolution is stored as a dense `30 x L` map. The
//! pooling window of one is the identity and is not materialized.
//!
//! The quantum layer prepares `H` then `RY(x_q + θ_q)` on each qubit and
//! returns the probabilities of basis indices `0..7`, leaving out `|111>`.
//! Qubit `q` is bit `q` of the index. Its Jacobian comes from the
//! parameter-shift rule on the angles.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{self, extract_features_with, FeatureMode, SampleRecord};
use crate::error::{Error, Result};
use crate::optim::{Optimizer, OptimizerState};
use crate::statevector::{Gate, StateVector};

pub const QUBITS: usize = 3;
pub const OUTPUTS: usize = 7;
pub const CONV_CHANNELS: usize = 30;
pub const FORMAT_VERSION: u32 = 1;

/// Lower and upper clamp applied to predictions inside the loss.
const PROB_FLOOR: f64 = 1e-12;

/// Fully connected layer; `weights` is row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Uniform in `±1/sqrt(inputs)` for weights and biases.
    pub fn init<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (inputs as f64).sqrt();
        let mut draw = |len| (0..len).map(|_| rng.random_range(-bound..bound)).collect();
        let weights = draw(inputs * outputs);
        let bias = draw(outputs);
        Self {
            inputs,
            outputs,
            weights,
            bias,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dx`.
    fn backward(&self, x: &[f64], dy: &[f64], grad: &mut Dense) -> Vec<f64> {
        let mut dx = vec![0.0; self.inputs];
        for (o, &g) in dy.iter().enumerate() {
            grad.bias[o] += g;
            let row = o * self.inputs;
            for i in 0..self.inputs {
                grad.weights[row + i] += g * x[i];
                dx[i] += self.weights[row + i] * g;
            }
        }
        dx
    }

    fn len(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Extra post-quantum stage: `dense(7 -> 3)` feeding another quantum layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumBlock {
    pub dense: Dense,
    pub thetas: [f64; QUBITS],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcnnModel {
    pub feature_len: usize,
    /// 30 kernels of length `feature_len`, one row each.
    pub conv: Dense,
    pub fc1: Dense,
    pub fc2: Dense,
    pub quantum_thetas: [f64; QUBITS],
    pub extra_blocks: Vec<QuantumBlock>,
    pub fc3: Dense,
    pub dropout_p: f64,
}

/// Quantum layer through the statevector simulator.
pub fn quantum_layer_forward(x: &[f64; QUBITS], thetas: &[f64; QUBITS]) -> [f64; OUTPUTS] {
    let phi = std::array::from_fn(|q| x[q] + thetas[q]);
    quantum_probabilities(&phi)
}

fn quantum_probabilities(phi: &[f64; QUBITS]) -> [f64; OUTPUTS] {
    let mut gates = Vec::with_capacity(2 * QUBITS);
    for (q, &angle) in phi.iter().enumerate() {
        gates.push(Gate::H(q));
        gates.push(Gate::Ry(q, angle));
    }
    let mut state = StateVector::new_zero(QUBITS).expect("3 qubits");
    state.apply_trusted(&gates);
    let p = state.probabilities();
    std::array::from_fn(|j| p[j])
}

/// All eight outcome probabilities from the product formula
/// `P(bit q = 1) = (1 + sin φ_q) / 2`.
pub fn quantum_layer_closed_form(phi: &[f64; QUBITS]) -> [f64; 8] {
    std::array::from_fn(|k| {
        (0..QUBITS)
            .map(|q| {
                let one = (1.0 + phi[q].sin()) / 2.0;
                if k >> q & 1 == 1 {
                    one
                } else {
                    1.0 - one
                }
            })
            .product()
    })
}

/// `J[j][q] = dP_j / dφ_q` by the parameter-shift rule.
pub fn quantum_jacobian(phi: &[f64; QUBITS]) -> [[f64; QUBITS]; OUTPUTS] {
    let mut jac = [[0.0; QUBITS]; OUTPUTS];
    for q in 0..QUBITS {
        let mut plus = *phi;
        let mut minus = *phi;
        plus[q] += FRAC_PI_2;
        minus[q] -= FRAC_PI_2;
        let (pp, pm) = (quantum_probabilities(&plus), quantum_probabilities(&minus));
        for j in 0..OUTPUTS {
            jac[j][q] = (pp[j] - pm[j]) / 2.0;
        }
    }
    jac
}

/// Clamped binary cross-entropy.
pub fn loss(prediction: f64, label: u8) -> f64 {
    let p = prediction.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn relu(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.max(0.0)).collect()
}

fn relu_back(z: &[f64], da: &[f64]) -> Vec<f64> {
    z.iter()
        .zip(da)
        .map(|(&z, &g)| if z > 0.0 { g } else { 0.0 })
        .collect()
}

/// Intermediate values kept for the backward pass.
struct Trace {
    z1: Vec<f64>,
    a1: Vec<f64>,
    z2: Vec<f64>,
    a2: Vec<f64>,
    /// Angles of each quantum layer, first layer included.
    phis: Vec<[f64; QUBITS]>,
    /// Outputs of each quantum layer.
    qs: Vec<[f64; OUTPUTS]>,
    dropped: [f64; OUTPUTS],
    prob: f64,
}

/// A classifier input with its label and the coupling it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: u8,
    pub coupling: f64,
}

impl Sample {
    pub fn from_record(record: &SampleRecord, mode: FeatureMode) -> Result<Self> {
        let state = record.reconstruct_state()?;
        Ok(Self {
            features: extract_features_with(&state, record.model, mode),
            label: record.label,
            coupling: record.coupling,
        })
    }
}

impl QcnnModel {
    pub fn new<R: Rng + ?Sized>(
        feature_len: usize,
        hidden: usize,
        extra_blocks: usize,
        dropout_p: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if feature_len == 0 || hidden == 0 {
            return Err(Error::Config(
                "feature length and hidden width must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&dropout_p) {
            return Err(Error::Config(format!("dropout {dropout_p} outside [0, 1)")));
        }
        let conv = Dense::init(feature_len, CONV_CHANNELS, rng);
        let fc1 = Dense::init(CONV_CHANNELS, hidden, rng);
        let fc2 = Dense::init(hidden, QUBITS, rng);
        let quantum_thetas = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        let extra_blocks = (0..extra_blocks)
            .map(|_| QuantumBlock {
                dense: Dense::init(OUTPUTS, QUBITS, rng),
                thetas: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
            })
            .collect();
        let fc3 = Dense::init(OUTPUTS, 1, rng);
        Ok(Self {
            feature_len,
            conv,
            fc1,
            fc2,
            quantum_thetas,
            extra_blocks,
            fc3,
            dropout_p,
        })
    }

    /// Same shapes, every parameter zero.
    pub fn zeros_like(&self) -> Self {
        let z = |d: &Dense| Dense::zeros(d.inputs, d.outputs);
        Self {
            feature_len: self.feature_len,
            conv: z(&self.conv),
            fc1: z(&self.fc1),
            fc2: z(&self.fc2),
            quantum_thetas: [0.0; QUBITS],
            extra_blocks: self
                .extra_blocks
                .iter()
                .map(|b| QuantumBlock {
                    dense: z(&b.dense),
                    thetas: [0.0; QUBITS],
                })
                .collect(),
            fc3: z(&self.fc3),
            dropout_p: self.dropout_p,
        }
    }

    pub fn hidden(&self) -> usize {
        self.fc1.outputs
    }

    pub fn n_params(&self) -> usize {
        self.conv.len()
            + self.fc1.len()
            + self.fc2.len()
            + QUBITS
            + self
                .extra_blocks
                .iter()
                .map(|b| b.dense.len() + QUBITS)
                .sum::<usize>()
            + self.fc3.len()
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for d in [&mut self.conv, &mut self.fc1, &mut self.fc2] {
            out.push(&mut d.weights);
            out.push(&mut d.bias);
        }
        out.push(&mut self.quantum_thetas);
        for b in &mut self.extra_blocks {
            out.push(&mut b.dense.weights);
            out.push(&mut b.dense.bias);
            out.push(&mut b.thetas);
        }
        out.push(&mut self.fc3.weights);
        out.push(&mut self.fc3.bias);
        out
    }

    /// All trainable values in a fixed order: conv, fc1, fc2 (weights then
    /// biases), quantum angles, extra blocks, fc3.
    pub fn params(&self) -> Vec<f64> {
        let mut copy = self.clone();
        copy.slices_mut()
            .into_iter()
            .flat_map(|s| s.to_vec())
            .collect()
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.n_params() {
            return Err(Error::Shape {
                expected: self.n_params(),
                actual: values.len(),
            });
        }
        let mut rest = values;
        for s in self.slices_mut() {
            let (head, tail) = rest.split_at(s.len());
            s.copy_from_slice(head);
            rest = tail;
        }
        Ok(())
    }

    fn check_features(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.feature_len {
            return Err(Error::Shape {
                expected: self.feature_len,
                actual: features.len(),
            });
        }
        Ok(())
    }

    /// Dropout mask for one sample: each output kept with probability
    /// `1 - p` and scaled by `1 / (1 - p)`.
    pub fn draw_mask<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; OUTPUTS] {
        let keep = 1.0 / (1.0 - self.dropout_p);
        std::array::from_fn(|_| {
            if rng.random::<f64>() < self.dropout_p {
                0.0
            } else {
                keep
            }
        })
    }

    fn trace(&self, x: &[f64], mask: Option<&[f64; OUTPUTS]>) -> Trace {
        let z1 = self.conv.forward(x);
        let a1 = relu(&z1);
        let z2 = self.fc1.forward(&a1);
        let a2 = relu(&z2);
        let z3 = self.fc2.forward(&a2);
        let mut phis = vec![std::array::from_fn(|q| z3[q] + self.quantum_thetas[q])];
        let mut qs = vec![quantum_probabilities(&phis[0])];
        for block in &self.extra_blocks {
            let u = block.dense.forward(qs.last().expect("first layer present"));
            let phi = std::array::from_fn(|q| u[q] + block.thetas[q]);
            qs.push(quantum_probabilities(&phi));
            phis.push(phi);
        }
        let last = qs.last().expect("first layer present");
        let dropped = std::array::from_fn(|j| last[j] * mask.map_or(1.0, |m| m[j]));
        let prob = sigmoid(self.fc3.forward(&dropped)[0]);
        Trace {
            z1,
            a1,
            z2,
            a2,
            phis,
            qs,
            dropped,
            prob,
        }
    }

    /// Predicted probability of label 1. Dropout masks are drawn from `rng`
    /// only when `training` is set.
    pub fn forward<R: Rng + ?Sized>(
        &self,
        features: &[f64],
        training: bool,
        rng: &mut R,
    ) -> Result<f64> {
        self.check_features(features)?;
        let mask = training.then(|| self.draw_mask(rng));
        Ok(self.trace(features, mask.as_ref()).prob)
    }

    /// Inference-mode prediction.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        self.check_features(features)?;
        Ok(self.trace(features, None).prob)
    }

    /// Loss, prediction and flat gradient (see [`QcnnModel::params`]) for one
    /// sample, given `dL/dlogit` as a function of the prediction.
    fn sample_gradient(
        &self,
        x: &[f64],
        label: u8,
        mask: Option<&[f64; OUTPUTS]>,
        upstream: impl Fn(f64) -> f64,
    ) -> (f64, f64, QcnnModel) {
        let t = self.trace(x, mask);
        let mut g = self.zeros_like();
        let dz4 = upstream(t.prob);

        let dd = self.fc3.backward(&t.dropped, &[dz4], &mut g.fc3);
        let mut dq: [f64; OUTPUTS] = std::array::from_fn(|j| dd[j] * mask.map_or(1.0, |m| m[j]));

        for b in (0..self.extra_blocks.len()).rev() {
            let dphi = back_through_quantum(&t.phis[b + 1], &dq);
            let block = &self.extra_blocks[b];
            let gb = &mut g.extra_blocks[b];
            gb.thetas.iter_mut().zip(&dphi).for_each(|(t, d)| *t += d);
            let dx = block.dense.backward(&t.qs[b], &dphi, &mut gb.dense);
            dq = std::array::from_fn(|j| dx[j]);
        }

        let dphi = back_through_quantum(&t.phis[0], &dq);
        g.quantum_thetas = dphi;
        let da2 = self.fc2.backward(&t.a2, &dphi, &mut g.fc2);
        let dz2 = relu_back(&t.z2, &da2);
        let da1 = self.fc1.backward(&t.a1, &dz2, &mut g.fc1);
        let dz1 = relu_back(&t.z1, &da1);
        self.conv.backward(x, &dz1, &mut g.conv);

        (loss(t.prob, label), t.prob, g)
    }

    /// Mean batch loss and its gradient in [`QcnnModel::params`] order.
    ///
    /// `masks` gives one dropout mask per sample; `None` runs without dropout.
    pub fn backward(
        &self,
        batch: &[Sample],
        masks: Option<&[[f64; OUTPUTS]]>,
    ) -> Result<(f64, Vec<f64>)> {
        let (loss, grad, _) = self.batch_gradient(batch, masks)?;
        Ok((loss, grad))
    }

    fn batch_gradient(
        &self,
        batch: &[Sample],
        masks: Option<&[[f64; OUTPUTS]]>,
    ) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::Argument("empty batch".into()));
        }
        if let Some(m) = masks {
            if m.len() != batch.len() {
                return Err(Error::Shape {
                    expected: batch.len(),
                    actual: m.len(),
                });
            }
        }
        for s in batch {
            self.check_features(&s.features)?;
        }
        let per_sample: Vec<(f64, f64, Vec<f64>)> = batch
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let y = f64::from(s.label);
                let (l, p, g) =
                    self.sample_gradient(&s.features, s.label, masks.map(|m| &m[i]), |p| p - y);
                (l, p, g.params())
            })
            .collect();

        let scale = 1.0 / batch.len() as f64;
        let mut grad = vec![0.0; self.n_params()];
        let mut total = 0.0;
        let mut preds = Vec::with_capacity(batch.len());
        for (l, p, g) in per_sample {
            total += l;
            preds.push(p);
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
        grad.iter_mut().for_each(|v| *v *= scale);
        Ok((total * scale, grad, preds))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        dataset::write_json(
            path,
            &CheckpointDoc {
                format_version: FORMAT_VERSION,
                model: self.clone(),
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: CheckpointDoc = serde_json::from_str(&text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "checkpoint format {} is not supported (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        doc.model.validate()?;
        Ok(doc.model)
    }

    fn validate(&self) -> Result<()> {
        let shapes = [
            (&self.conv, self.feature_len, CONV_CHANNELS),
            (&self.fc1, CONV_CHANNELS, self.fc1.outputs),
            (&self.fc2, self.fc1.outputs, QUBITS),
            (&self.fc3, OUTPUTS, 1),
        ];
        let blocks = self
            .extra_blocks
            .iter()
            .map(|b| (&b.dense, OUTPUTS, QUBITS));
        for (d, inputs, outputs) in shapes.into_iter().chain(blocks) {
            if d.inputs != inputs
                || d.outputs != outputs
                || d.weights.len() != inputs * outputs
                || d.bias.len() != outputs
            {
                return Err(Error::Config(
                    "checkpoint layer shapes are inconsistent".into(),
                ));
            }
        }
        if self.params().iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "checkpoint contains non-finite weights".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(Error::Config("checkpoint dropout outside [0, 1)".into()));
        }
        Ok(())
    }
}

/// `dL/dφ = Jᵀ dL/dP`.
fn back_through_quantum(phi: &[f64; QUBITS], dq: &[f64; OUTPUTS]) -> [f64; QUBITS] {
    let jac = quantum_jacobian(phi);
    std::array::from_fn(|q| (0..OUTPUTS).map(|j| dq[j] * jac[j][q]).sum())
}

#[derive(Serialize, Deserialize)]
struct CheckpointDoc {
    format_version: u32,
    model: QcnnModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub split_fraction: f64,
    pub threshold: f64,
    pub seed: u64,
    pub hidden: usize,
    pub dropout_p: f64,
    /// Number of extra `dense(7 -> 3) -> quantum` stages after the first
    /// quantum layer.
    pub extra_blocks: usize,
    /// Expand the training split with symmetry variants.
    pub augment: bool,
    /// Random global Z-rotations per XXZ training record when augmenting.
    pub augment_rotations: usize,
    pub feature_mode: FeatureMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            learning_rate: 1e-3,
            batch_size: 16,
            split_fraction: 0.8,
            threshold: 0.5,
            seed: 0,
            hidden: 16,
            dropout_p: 0.5,
            extra_blocks: 0,
            augment: false,
            augment_rotations: 1,
            feature_mode: FeatureMode::Correlators,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return fail(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return fail(format!("threshold {} outside (0, 1)", self.threshold));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return fail(format!(
                "split fraction {} outside (0, 1)",
                self.split_fraction
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return fail(format!("dropout {} outside [0, 1)", self.dropout_p));
        }
        if self.hidden == 0 {
            return fail("hidden width must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub coupling: f64,
    pub probability: f64,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    /// `confusion[actual][predicted]`.
    pub confusion: [[usize; 2]; 2],
    /// Inference probabilities sorted by coupling.
    pub curve: Vec<CurvePoint>,
}

impl Evaluation {
    /// Coupling where the curve first rises above `threshold`, linearly
    /// interpolated between the neighbouring points.
    pub fn crossing(&self, threshold: f64) -> Option<f64> {
        crossing(&self.curve, threshold)
    }
}

pub fn crossing(curve: &[CurvePoint], threshold: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        (a.probability <= threshold && b.probability > threshold).then(|| {
            let t = (threshold - a.probability) / (b.probability - a.probability);
            a.coupling + t * (b.coupling - a.coupling)
        })
    })
}

/// Inference-mode accuracy, confusion matrix and probability curve.
pub fn evaluate(model: &QcnnModel, samples: &[Sample], threshold: f64) -> Result<Evaluation> {
    if samples.is_empty() {
        return Err(Error::Argument("cannot evaluate an empty set".into()));
    }
    let probs: Vec<f64> = samples
        .par_iter()
        .map(|s| model.predict(&s.features))
        .collect::<Result<_>>()?;
    let mut confusion = [[0usize; 2]; 2];
    let mut curve = Vec::with_capacity(samples.len());
    for (s, &p) in samples.iter().zip(&probs) {
        let predicted = usize::from(p > threshold);
        confusion[usize::from(s.label)][predicted] += 1;
        curve.push(CurvePoint {
            coupling: s.coupling,
            probability: p,
            label: s.label,
        });
    }
    curve.sort_by(|a, b| a.coupling.total_cmp(&b.coupling));
    let correct = confusion[0][0] + confusion[1][1];
    Ok(Evaluation {
        accuracy: correct as f64 / samples.len() as f64,
        confusion,
        curve,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training loss per epoch, dropout active.
    pub loss_history: Vec<f64>,
    /// Training accuracy per epoch from the same dropout-active predictions.
    pub train_accuracy_history: Vec<f64>,
    pub test_accuracy: f64,
    pub confusion: [[usize; 2]; 2],
    /// Training records before augmentation.
    pub raw_train_size: usize,
    /// Training samples actually used, after augmentation.
    pub train_size: usize,
    pub test_size: usize,
    pub test_curve: Vec<CurvePoint>,
    pub crossing: Option<f64>,
}

fn features_of(records: &[SampleRecord], mode: FeatureMode) -> Result<Vec<Sample>> {
    records
        .par_iter()
        .map(|r| Sample::from_record(r, mode))
        .collect()
}

/// Splits `records`, optionally augments the training half, trains, and
/// evaluates on the held-out half.
pub fn train(records: &[SampleRecord], config: &TrainConfig) -> Result<(QcnnModel, TrainReport)> {
    config.validate()?;
    if records.is_empty() {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }
    if !(records.iter().any(|r| r.label == 0) && records.iter().any(|r| r.label == 1)) {
        return Err(Error::Argument("dataset contains a single class".into()));
    }
    let (train_records, test_records) =
        dataset::split(records, config.split_fraction, config.seed)?;
    let raw_train_size = train_records.len();
    let train_records = if config.augment {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::vqe::mix64(config.seed ^ 0xa46d));
        train_records
            .iter()
            .flat_map(|r| dataset::augment(r, config.augment_rotations, &mut rng))
            .collect()
    } else {
        train_records
    };
    let train_set = features_of(&train_records, config.feature_mode)?;
    let test_set = features_of(&test_records, config.feature_mode)?;
    let (model, mut report) = train_samples(&train_set, &test_set, config)?;
    report.raw_train_size = raw_train_size;
    Ok((model, report))
}

/// Training loop on precomputed samples.
pub fn train_samples(
    train_set: &[Sample],
    test_set: &[Sample],
    config: &TrainConfig,
) -> Result<(QcnnModel, TrainReport)> {
    config.validate()?;
    let Some(first) = train_set.first() else {
        return Err(Error::Argument("empty training set".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = QcnnModel::new(
        first.features.len(),
        config.hidden,
        config.extra_blocks,
        config.dropout_p,
        &mut rng,
    )?;
    let mut params = model.params();
    let mut opt = OptimizerState::new(Optimizer::default(), params.len());
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut loss_history = Vec::with_capacity(config.epochs);
    let mut acc_history = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut correct = 0usize;
        for idx in order.chunks(config.batch_size) {
            let batch: Vec<Sample> = idx.iter().map(|&i| train_set[i].clone()).collect();
            let masks: Vec<[f64; OUTPUTS]> =
                batch.iter().map(|_| model.draw_mask(&mut rng)).collect();
            let (batch_loss, grad, preds) = model.batch_gradient(&batch, Some(&masks))?;
            if !batch_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Divergence {
                    iteration: loss_history.len(),
                });
            }
            epoch_loss += batch_loss * batch.len() as f64;
            correct += batch
                .iter()
                .zip(&preds)
                .filter(|(s, &p)| u8::from(p > config.threshold) == s.label)
                .count();
            opt.step(&mut params, &grad, config.learning_rate);
            model.set_params(&params)?;
        }
        loss_history.push(epoch_loss / train_set.len() as f64);
        acc_history.push(correct as f64 / train_set.len() as f64);
    }

    let (test_accuracy, confusion, test_curve, crossing) = if test_set.is_empty() {
        (0.0, [[0; 2]; 2], Vec::new(), None)
    } else {
        let e = evaluate(&model, test_set, config.threshold)?;
        let c = e.crossing(config.threshold);
        (e.accuracy, e.confusion, e.curve, c)
    };
    let report = TrainReport {
        loss_history,
        train_accuracy_history: acc_history,
        test_accuracy,
        confusion,
        raw_train_size: train_set.len(),
        train_size: train_set.len(),
        test_size: test_set.len(),
        test_curve,
        crossing,
    };
    Ok((model, report))
}

/// Writes `epoch,train_loss,train_acc` rows, epochs counted from 1.
pub fn write_metrics_csv(path: &Path, report: &TrainReport) -> Result<()> {
    let mut out = String::from("epoch,train_loss,train_acc\n");
    for (i, (l, a)) in report
        .loss_history
        .iter()
        .zip(&report.train_accuracy_history)
        .enumerate()
    {
        out.push_str(&format!("{},{l},{a}\n", i + 1));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn write_report(path: &Path, report: &TrainReport) -> Result<()> {
    dataset::write_json(path, report)
}
