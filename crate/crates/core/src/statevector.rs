//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian), so on two qubits
//! the amplitude at index 1 belongs to `|q1 q0> = |01>`, i.e. qubit 0 set.
//!
//! Gate kernels split the amplitude array into fixed-size chunks and update
//! them concurrently. Every amplitude is written by exactly one task and all
//! reductions sum per-chunk partials in chunk order, so results do not depend
//! on the size of the rayon pool they run in.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::PauliString;

pub type C64 = Complex64;

/// Largest supported register.
pub const MAX_QUBITS: usize = 24;

const CHUNK_BITS: usize = 12;
const CHUNK: usize = 1 << CHUNK_BITS;

/// A gate from the simulator's fixed gate set.
///
/// Rotations follow `R_P(θ) = exp(-iθP/2)`; `Rzz(a, b)` uses `P = Z_a Z_b` and
/// `Rzy(a, b)` uses `P = Z_a Y_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Ry(usize, f64),
    Rz(usize, f64),
    Rzz(usize, usize, f64),
    Rzy(usize, usize, f64),
    Cnot { control: usize, target: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Ry,
    Rz,
    Rzz,
    Rzy,
    Cnot,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Rzz(..) => GateKind::Rzz,
            Gate::Rzy(..) => GateKind::Rzy,
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Rzz(a, b, _) | Gate::Rzy(a, b, _) => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    /// Rotation angle, `None` for the fixed gates.
    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Ry(_, t) | Gate::Rz(_, t) | Gate::Rzz(_, _, t) | Gate::Rzy(_, _, t) => Some(t),
            _ => None,
        }
    }

    /// Same gate with its rotation angle replaced. Fixed gates are returned unchanged.
    pub fn with_angle(self, angle: f64) -> Gate {
        match self {
            Gate::Ry(q, _) => Gate::Ry(q, angle),
            Gate::Rz(q, _) => Gate::Rz(q, angle),
            Gate::Rzz(a, b, _) => Gate::Rzz(a, b, angle),
            Gate::Rzy(a, b, _) => Gate::Rzy(a, b, angle),
            g => g,
        }
    }

    pub(crate) fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::Index { index: q, n_qubits });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Argument(format!(
                "two-qubit gate on repeated qubit {}",
                qs[0]
            )));
        }
        Ok(())
    }
}

/// An ordered gate list on a fixed register size.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(n_qubits: usize, ops: Vec<Gate>) -> Result<Self> {
        for g in &ops {
            g.validate(n_qubits)?;
        }
        Ok(Self { n_qubits, ops })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.ops.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Full amplitude vector of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new_zero(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps a raw amplitude vector, normalizing it to unit length.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Size(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_size(n_qubits)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain(
                "amplitude vector has zero or non-finite norm".into(),
            ));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_unchecked(&mut self.amplitudes, gate);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::Shape {
                expected: self.n_qubits,
                actual: circuit.n_qubits,
            });
        }
        // ops were validated when the circuit was built
        for gate in &circuit.ops {
            apply_unchecked(&mut self.amplitudes, gate);
        }
        Ok(())
    }

    /// Applies gates that are already known to be valid for this register.
    pub(crate) fn apply_trusted(&mut self, gates: &[Gate]) {
        for gate in gates {
            debug_assert!(gate.validate(self.n_qubits).is_ok());
            apply_unchecked(&mut self.amplitudes, gate);
        }
    }

    pub fn norm(&self) -> f64 {
        chunked_sum_real(self.amplitudes.len(), |r| {
            self.amplitudes[r].iter().map(|a| a.norm_sqr()).sum()
        })
        .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Shape {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        Ok(chunked_sum_complex(self.amplitudes.len(), |r| {
            self.amplitudes[r.clone()]
                .iter()
                .zip(&other.amplitudes[r])
                .map(|(a, b)| a.conj() * b)
                .sum()
        }))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Exact `<psi|P|psi>`.
    pub fn pauli_expectation(&self, pauli: &PauliString) -> Result<f64> {
        Ok(self.pauli_expectation_complex(pauli)?.re)
    }

    /// Raw complex `<psi|P|psi>`; the imaginary part vanishes up to rounding.
    pub fn pauli_expectation_complex(&self, pauli: &PauliString) -> Result<C64> {
        if pauli.len() != self.n_qubits {
            return Err(Error::Shape {
                expected: self.n_qubits,
                actual: pauli.len(),
            });
        }
        let masks = pauli.masks();
        let amps = &self.amplitudes;
        let raw = chunked_sum_complex(amps.len(), |r| {
            let mut acc = C64::new(0.0, 0.0);
            for k in r {
                let term = amps[k ^ masks.flip].conj() * amps[k];
                if (k & masks.sign).count_ones() & 1 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        });
        Ok(raw * masks.phase())
    }

    /// `|amplitude_k|^2` for every basis index `k`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Size(format!(
            "register of {n_qubits} qubits outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn apply_unchecked(amps: &mut [C64], gate: &Gate) {
    match *gate {
        Gate::H(q) => for_each_pair(amps, q, |_, a, b| {
            let (x, y) = (*a, *b);
            *a = (x + y) * FRAC_1_SQRT_2;
            *b = (x - y) * FRAC_1_SQRT_2;
        }),
        Gate::X(q) => for_each_pair(amps, q, |_, a, b| std::mem::swap(a, b)),
        Gate::Ry(q, theta) => {
            let (s, c) = (theta / 2.0).sin_cos();
            for_each_pair(amps, q, move |_, a, b| {
                let (x, y) = (*a, *b);
                *a = x * c - y * s;
                *b = x * s + y * c;
            })
        }
        Gate::Rz(q, theta) => {
            let lo = C64::from_polar(1.0, -theta / 2.0);
            let hi = lo.conj();
            for_each_pair(amps, q, move |_, a, b| {
                *a *= lo;
                *b *= hi;
            })
        }
        Gate::Rzz(p, q, theta) => {
            let even = C64::from_polar(1.0, -theta / 2.0);
            let odd = even.conj();
            let mask = (1usize << p) | (1usize << q);
            for_each_amp(amps, move |k, a| {
                if (k & mask).count_ones() & 1 == 0 {
                    *a *= even;
                } else {
                    *a *= odd;
                }
            })
        }
        Gate::Rzy(z, y, theta) => {
            // RY(+θ) on `y` where qubit `z` is 0, RY(-θ) where it is 1
            let (s, c) = (theta / 2.0).sin_cos();
            let zbit = 1usize << z;
            for_each_pair(amps, y, move |k, a, b| {
                let s = if k & zbit == 0 { s } else { -s };
                let (x, w) = (*a, *b);
                *a = x * c - w * s;
                *b = x * s + w * c;
            })
        }
        Gate::Cnot { control, target } => {
            let cbit = 1usize << control;
            for_each_pair(amps, target, move |k, a, b| {
                if k & cbit != 0 {
                    std::mem::swap(a, b);
                }
            })
        }
    }
}

/// Calls `f(k, &mut amp[k], &mut amp[k | 1 << target])` for every `k` with the
/// target bit clear.
pub(crate) fn for_each_pair<F>(amps: &mut [C64], target: usize, f: F)
where
    F: Fn(usize, &mut C64, &mut C64) + Sync,
{
    let stride = 1usize << target;
    if amps.len() <= CHUNK {
        pairs_serial(amps, 0, stride, &f);
    } else if 2 * stride <= CHUNK {
        amps.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| pairs_serial(chunk, c * CHUNK, stride, &f));
    } else {
        amps.par_chunks_mut(2 * stride)
            .enumerate()
            .for_each(|(blk, block)| {
                let base = blk * 2 * stride;
                let (lo, hi) = block.split_at_mut(stride);
                lo.par_chunks_mut(CHUNK)
                    .zip(hi.par_chunks_mut(CHUNK))
                    .enumerate()
                    .for_each(|(c, (l, h))| {
                        let off = base + c * CHUNK;
                        for (j, (a, b)) in l.iter_mut().zip(h.iter_mut()).enumerate() {
                            f(off + j, a, b);
                        }
                    });
            });
    }
}

#[inline]
fn pairs_serial<F>(amps: &mut [C64], offset: usize, stride: usize, f: &F)
where
    F: Fn(usize, &mut C64, &mut C64),
{
    if stride == 1 {
        for (blk, pair) in amps.chunks_exact_mut(2).enumerate() {
            let [a, b] = pair else { unreachable!() };
            f(offset + 2 * blk, a, b);
        }
        return;
    }
    for (blk, block) in amps.chunks_exact_mut(2 * stride).enumerate() {
        let base = offset + blk * 2 * stride;
        let (lo, hi) = block.split_at_mut(stride);
        for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(base + j, a, b);
        }
    }
}

pub(crate) fn for_each_amp<F>(amps: &mut [C64], f: F)
where
    F: Fn(usize, &mut C64) + Sync,
{
    if amps.len() <= CHUNK {
        amps.iter_mut().enumerate().for_each(|(k, a)| f(k, a));
    } else {
        amps.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let off = c * CHUNK;
                chunk
                    .iter_mut()
                    .enumerate()
                    .for_each(|(j, a)| f(off + j, a));
            });
    }
}

/// Fixed chunk ranges covering `0..len`.
pub(crate) fn chunk_ranges(
    len: usize,
) -> impl IndexedParallelIterator<Item = std::ops::Range<usize>> {
    let n = len.div_ceil(CHUNK);
    (0..n)
        .into_par_iter()
        .map(move |c| c * CHUNK..((c + 1) * CHUNK).min(len))
}

/// Sums per-chunk partials in chunk order.
pub(crate) fn chunked_sum_complex<F>(len: usize, partial: F) -> C64
where
    F: Fn(std::ops::Range<usize>) -> C64 + Sync,
{
    if len <= CHUNK {
        return partial(0..len);
    }
    let parts: Vec<C64> = chunk_ranges(len).map(&partial).collect();
    parts.into_iter().fold(C64::new(0.0, 0.0), |acc, p| acc + p)
}

pub(crate) fn chunked_sum_real<F>(len: usize, partial: F) -> f64
where
    F: Fn(std::ops::Range<usize>) -> f64 + Sync,
{
    if len <= CHUNK {
        return partial(0..len);
    }
    let parts: Vec<f64> = chunk_ranges(len).map(&partial).collect();
    parts.into_iter().fold(0.0, |acc, p| acc + p)
}

/// Whether kernels on this register size fan out to the thread pool.
pub(crate) fn is_parallel_size(n_qubits: usize) -> bool {
    (1usize << n_qubits) > CHUNK
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn zero_state() {
        assert_eq!(
            StateVector::new_zero(1).unwrap().amplitudes(),
            &[c(1., 0.), c(0., 0.)]
        );
        assert_eq!(
            StateVector::new_zero(2).unwrap().amplitudes(),
            &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]
        );
        assert!(matches!(StateVector::new_zero(25), Err(Error::Size(_))));
        assert!(matches!(StateVector::new_zero(0), Err(Error::Size(_))));
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new_zero(1).unwrap();
        s.apply_gate(&Gate::H(0)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[c(h, 0.), c(h, 0.)], 1e-15));
    }

    #[test]
    fn ry_pi_flips() {
        let mut s = StateVector::new_zero(1).unwrap();
        s.apply_gate(&Gate::Ry(0, PI)).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn rzz_phases_basis_states() {
        let theta = 0.7;
        for k in 0..4 {
            let mut amps = vec![c(0., 0.); 4];
            amps[k] = c(1., 0.);
            let mut s = StateVector::from_amplitudes(amps).unwrap();
            s.apply_gate(&Gate::Rzz(0, 1, theta)).unwrap();
            let parity_odd = (k.count_ones() & 1) == 1;
            let expect = C64::from_polar(
                1.0,
                if parity_odd {
                    theta / 2.0
                } else {
                    -theta / 2.0
                },
            );
            assert!((s.amplitudes()[k] - expect).norm() < 1e-15);
            let p = s.probabilities();
            assert!((p[k] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn little_endian_convention() {
        let mut s = StateVector::new_zero(2).unwrap();
        s.apply_gate(&Gate::X(0)).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 1.0, 0.0, 0.0]);
        let mut s = StateVector::new_zero(2).unwrap();
        s.apply_gate(&Gate::X(1)).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn cnot_truth_table() {
        for k in 0..4usize {
            let mut amps = vec![c(0., 0.); 4];
            amps[k] = c(1., 0.);
            let mut s = StateVector::from_amplitudes(amps).unwrap();
            s.apply_gate(&Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
            let expect = if k & 1 == 1 { k ^ 2 } else { k };
            assert_eq!(s.probabilities()[expect], 1.0);
        }
    }

    #[test]
    fn invalid_targets() {
        let mut s = StateVector::new_zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::H(2)),
            Err(Error::Index {
                index: 2,
                n_qubits: 2
            })
        ));
        assert!(s.apply_gate(&Gate::Rzz(1, 1, 0.3)).is_err());
        assert!(Circuit::from_ops(
            2,
            vec![Gate::Cnot {
                control: 0,
                target: 5
            }]
        )
        .is_err());
    }

    #[test]
    fn circuit_shape_mismatch() {
        let mut s = StateVector::new_zero(3).unwrap();
        let circ = Circuit::new(2);
        assert!(matches!(s.apply_circuit(&circ), Err(Error::Shape { .. })));
    }

    #[test]
    fn empty_circuit_and_involution() {
        let s0 = StateVector::new_zero(3).unwrap();
        let mut s = s0.clone();
        s.apply_circuit(&Circuit::new(3)).unwrap();
        assert_eq!(s, s0);

        let mut s = StateVector::new_zero(1).unwrap();
        let circ = Circuit::from_ops(1, vec![Gate::H(0), Gate::H(0)]).unwrap();
        s.apply_circuit(&circ).unwrap();
        assert!(close(
            s.amplitudes(),
            StateVector::new_zero(1).unwrap().amplitudes(),
            1e-12
        ));
    }

    #[test]
    fn basic_expectations() {
        let zero = StateVector::new_zero(1).unwrap();
        assert_eq!(zero.pauli_expectation(&"Z".parse().unwrap()).unwrap(), 1.0);
        assert_eq!(zero.pauli_expectation(&"X".parse().unwrap()).unwrap(), 0.0);

        let h = FRAC_1_SQRT_2;
        let bell =
            StateVector::from_amplitudes(vec![c(0., 0.), c(h, 0.), c(h, 0.), c(0., 0.)]).unwrap();
        let zz = bell.pauli_expectation(&"ZZ".parse().unwrap()).unwrap();
        assert!((zz + 1.0).abs() < 1e-12);
        assert!(matches!(
            bell.pauli_expectation(&"Z".parse().unwrap()),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn y_expectation_sign() {
        // (|0> + i|1>)/sqrt2 is the +1 eigenstate of Y
        let h = FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(vec![c(h, 0.), c(0., h)]).unwrap();
        let y = s.pauli_expectation(&"Y".parse().unwrap()).unwrap();
        assert!((y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_of_product_state() {
        let mut s = StateVector::new_zero(1).unwrap();
        assert_eq!(s.probabilities(), vec![1.0, 0.0]);
        s.apply_gate(&Gate::H(0)).unwrap();
        let p = s.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        let mut s = StateVector::new_zero(3).unwrap();
        for q in 0..3 {
            s.apply_gate(&Gate::H(q)).unwrap();
            s.apply_gate(&Gate::Ry(q, 0.0)).unwrap();
        }
        let p = s.probabilities();
        assert!(p.iter().all(|x| (x - 0.125).abs() < 1e-12));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parallel_kernels_match_serial_reference() {
        // 14 qubits exceeds one chunk, so every kernel path is exercised
        let n = 14;
        let mut s = StateVector::new_zero(n).unwrap();
        for q in 0..n {
            s.apply_gate(&Gate::H(q)).unwrap();
            s.apply_gate(&Gate::Ry(q, 0.1 * q as f64 + 0.2)).unwrap();
        }
        let gates = [
            Gate::Ry(13, 0.7),
            Gate::Rz(12, -0.4),
            Gate::Rzz(0, 13, 1.1),
            Gate::Rzy(13, 4, -0.6),
            Gate::Rzy(2, 13, 0.9),
            Gate::Cnot {
                control: 13,
                target: 2,
            },
            Gate::Cnot {
                control: 1,
                target: 12,
            },
            Gate::X(11),
            Gate::H(3),
        ];
        let mut reference = s.amplitudes().to_vec();
        for g in &gates {
            s.apply_gate(g).unwrap();
            serial_reference(&mut reference, g);
        }
        assert_eq!(s.amplitudes(), &reference[..]);
    }

    fn serial_reference(amps: &mut [C64], gate: &Gate) {
        if let Gate::Rzz(p, q, th) = *gate {
            for (k, a) in amps.iter_mut().enumerate() {
                let odd = ((k >> p) ^ (k >> q)) & 1 == 1;
                *a *= C64::from_polar(1.0, if odd { th / 2.0 } else { -th / 2.0 });
            }
            return;
        }
        let bit = 1usize << *gate.qubits().last().unwrap();
        for k in (0..amps.len()).filter(|k| k & bit == 0) {
            let (x, y) = (amps[k], amps[k | bit]);
            let (nx, ny) = match *gate {
                Gate::H(_) => ((x + y) * FRAC_1_SQRT_2, (x - y) * FRAC_1_SQRT_2),
                Gate::X(_) => (y, x),
                Gate::Ry(_, th) => {
                    let (s, c) = (th / 2.0).sin_cos();
                    (x * c - y * s, x * s + y * c)
                }
                Gate::Rz(_, th) => {
                    let lo = C64::from_polar(1.0, -th / 2.0);
                    (x * lo, y * lo.conj())
                }
                Gate::Rzy(z, _, th) => {
                    let th = if k & (1 << z) == 0 { th } else { -th };
                    let (s, c) = (th / 2.0).sin_cos();
                    (x * c - y * s, x * s + y * c)
                }
                Gate::Cnot { control, .. } if k & (1 << control) != 0 => (y, x),
                Gate::Cnot { .. } => (x, y),
                Gate::Rzz(..) => unreachable!(),
            };
            amps[k] = nx;
            amps[k | bit] = ny;
        }
    }
}
