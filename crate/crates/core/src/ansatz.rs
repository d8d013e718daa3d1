//! Checkerboard (brick-wall) variational circuit.
//!
//! Layout: one RY on every qubit, then `depth` layers of nearest-neighbour
//! entangler blocks, odd layers on pairs (0,1),(2,3),... and even layers on
//! (1,2),(3,4),... Each block is `RY(β) ⊗ RY(γ)` followed by the two-qubit
//! rotation `RZY(α) = exp(-i α Z_a Y_b / 2)`.
//!
//! A `ZZ` generator would only add imaginary corrections to the real ground
//! states of these chains; `ZY` keeps the amplitudes real and lets the
//! entangler move weight between basis states, which is what the optimizer
//! needs.
//!
//! Parameter slots: `0..n` are the initial RYs, then every block takes three
//! consecutive slots `(α, β, γ)` in layer-major, left-to-right order.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::statevector::{Gate, StateVector};

pub const SCHEME: &str = "checkerboard-v1";

/// Two-qubit entangler on `(left, left + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntanglerBlock {
    pub left: usize,
    pub ent_slot: usize,
    pub left_slot: usize,
    pub right_slot: usize,
}

impl EntanglerBlock {
    pub fn pair(&self) -> (usize, usize) {
        (self.left, self.left + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckerboardAnsatz {
    n_qubits: usize,
    depth: usize,
    layers: Vec<Vec<EntanglerBlock>>,
    n_params: usize,
    /// Gates in application order; parametrized gates carry their slot.
    program: Vec<(Gate, Option<usize>)>,
}

/// Serializable `(n, depth, scheme)` triple identifying an ansatz.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzDescriptor {
    pub n: usize,
    pub depth: usize,
    pub scheme: String,
}

impl AnsatzDescriptor {
    pub fn build(&self) -> Result<CheckerboardAnsatz> {
        if self.scheme != SCHEME {
            return Err(Error::Argument(format!(
                "unknown ansatz scheme '{}'",
                self.scheme
            )));
        }
        build_checkerboard(self.n, self.depth)
    }
}

pub fn build_checkerboard(n: usize, depth: usize) -> Result<CheckerboardAnsatz> {
    if n < 2 || depth < 1 {
        return Err(Error::Size(format!(
            "checkerboard needs n >= 2 and depth >= 1, got n={n}, depth={depth}"
        )));
    }
    if n > crate::statevector::MAX_QUBITS {
        return Err(Error::Size(format!("{n} qubits exceeds simulator limit")));
    }
    let mut next = n;
    let mut layers = Vec::with_capacity(depth);
    for layer in 0..depth {
        let first = layer % 2;
        let blocks: Vec<EntanglerBlock> = (first..n - 1)
            .step_by(2)
            .map(|left| {
                let b = EntanglerBlock {
                    left,
                    ent_slot: next,
                    left_slot: next + 1,
                    right_slot: next + 2,
                };
                next += 3;
                b
            })
            .collect();
        layers.push(blocks);
    }

    let mut program: Vec<(Gate, Option<usize>)> =
        (0..n).map(|q| (Gate::Ry(q, 0.0), Some(q))).collect();
    for block in layers.iter().flatten() {
        let (a, b) = block.pair();
        program.push((Gate::Ry(a, 0.0), Some(block.left_slot)));
        program.push((Gate::Ry(b, 0.0), Some(block.right_slot)));
        program.push((Gate::Rzy(a, b, 0.0), Some(block.ent_slot)));
    }

    Ok(CheckerboardAnsatz {
        n_qubits: n,
        depth,
        layers,
        n_params: next,
        program,
    })
}

impl CheckerboardAnsatz {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn layers(&self) -> &[Vec<EntanglerBlock>] {
        &self.layers
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn block_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn descriptor(&self) -> AnsatzDescriptor {
        AnsatzDescriptor {
            n: self.n_qubits,
            depth: self.depth,
            scheme: SCHEME.to_string(),
        }
    }

    /// Gate sequence for a parameter vector.
    pub fn gates(&self, theta: &[f64]) -> Result<Vec<Gate>> {
        self.check_len(theta)?;
        Ok(self.bound_gates(theta))
    }

    fn bound_gates(&self, theta: &[f64]) -> Vec<Gate> {
        self.program
            .iter()
            .map(|&(g, slot)| match slot {
                Some(k) => g.with_angle(theta[k]),
                None => g,
            })
            .collect()
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::Shape {
                expected: self.n_params,
                actual: theta.len(),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("non-finite circuit parameter".into()));
        }
        Ok(())
    }

    /// Runs the circuit on `|0...0>`.
    pub fn prepare_state(&self, theta: &[f64]) -> Result<StateVector> {
        let gates = self.gates(theta)?;
        let mut state = StateVector::new_zero(self.n_qubits)?;
        state.apply_trusted(&gates);
        Ok(state)
    }

    pub fn energy_of(&self, theta: &[f64], ham: &Hamiltonian) -> Result<f64> {
        self.check_ham(ham)?;
        ham.energy(&self.prepare_state(theta)?)
    }

    fn check_ham(&self, ham: &Hamiltonian) -> Result<()> {
        if ham.n_qubits() != self.n_qubits {
            return Err(Error::Shape {
                expected: self.n_qubits,
                actual: ham.n_qubits(),
            });
        }
        Ok(())
    }

    /// Parameter-shift gradient `[E(θ + π/2 e_k) - E(θ - π/2 e_k)] / 2`.
    pub fn gradient_parameter_shift(&self, theta: &[f64], ham: &Hamiltonian) -> Result<Vec<f64>> {
        Ok(self.energy_and_gradient(theta, ham)?.1)
    }

    /// Energy at `θ` together with its parameter-shift gradient.
    ///
    /// Walks the gate list once, keeping the state just before the current
    /// gate; the two shifted circuits for that gate start from the cached
    /// prefix, which produces the same amplitudes as simulating them from
    /// scratch.
    pub fn energy_and_gradient(&self, theta: &[f64], ham: &Hamiltonian) -> Result<(f64, Vec<f64>)> {
        self.check_len(theta)?;
        self.check_ham(ham)?;
        let gates = self.bound_gates(theta);
        let mut grad = vec![0.0; self.n_params];
        let mut prefix = StateVector::new_zero(self.n_qubits)?;
        for (i, &(_, slot)) in self.program.iter().enumerate() {
            let g = gates[i];
            let Some(slot) = slot else {
                prefix.apply_trusted(&[g]);
                continue;
            };
            let angle = theta[slot];
            let mut shifted = [0.0; 2];
            for (out, sign) in shifted.iter_mut().zip([1.0, -1.0]) {
                let mut s = prefix.clone();
                s.apply_trusted(&[g.with_angle(angle + sign * FRAC_PI_2)]);
                s.apply_trusted(&gates[i + 1..]);
                *out = ham.energy(&s)?;
            }
            grad[slot] = (shifted[0] - shifted[1]) / 2.0;
            prefix.apply_trusted(&[g]);
        }
        let energy = ham.energy(&prefix)?;
        Ok((energy, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_tfim;
    use std::f64::consts::PI;

    #[test]
    fn layouts() {
        let a = build_checkerboard(4, 2).unwrap();
        let pairs: Vec<Vec<(usize, usize)>> = a
            .layers()
            .iter()
            .map(|l| l.iter().map(EntanglerBlock::pair).collect())
            .collect();
        assert_eq!(pairs, vec![vec![(0, 1), (2, 3)], vec![(1, 2)]]);
        assert_eq!(a.n_params(), 13);

        let a = build_checkerboard(10, 4).unwrap();
        let counts: Vec<usize> = a.layers().iter().map(Vec::len).collect();
        assert_eq!(counts, vec![5, 4, 5, 4]);
        assert_eq!(a.n_params(), 64);

        assert_eq!(build_checkerboard(2, 1).unwrap().n_params(), 5);
        assert_eq!(build_checkerboard(10, 6).unwrap().n_params(), 91);
    }

    #[test]
    fn layer_block_counts() {
        for n in 2..12 {
            for depth in 1..6 {
                let a = build_checkerboard(n, depth).unwrap();
                for (l, layer) in a.layers().iter().enumerate() {
                    let expected = if l % 2 == 0 { n / 2 } else { (n - 1) / 2 };
                    assert_eq!(layer.len(), expected);
                }
                assert_eq!(a.n_params(), n + 3 * a.block_count());
            }
        }
    }

    #[test]
    fn slot_order() {
        let a = build_checkerboard(4, 2).unwrap();
        let b = a.layers()[0][1];
        assert_eq!((b.ent_slot, b.left_slot, b.right_slot), (7, 8, 9));
        let b = a.layers()[1][0];
        assert_eq!((b.ent_slot, b.left_slot, b.right_slot), (10, 11, 12));
        let mut slots: Vec<usize> = a.program.iter().filter_map(|p| p.1).collect();
        slots.sort_unstable();
        assert_eq!(slots, (0..a.n_params()).collect::<Vec<_>>());
    }

    #[test]
    fn size_errors() {
        assert!(matches!(build_checkerboard(1, 1), Err(Error::Size(_))));
        assert!(matches!(build_checkerboard(4, 0), Err(Error::Size(_))));
    }

    #[test]
    fn zero_parameters_give_zero_state() {
        let a = build_checkerboard(5, 3).unwrap();
        let s = a.prepare_state(&vec![0.0; a.n_params()]).unwrap();
        assert_eq!(s, StateVector::new_zero(5).unwrap());
    }

    #[test]
    fn single_rotation_flips_qubit_zero() {
        let a = build_checkerboard(2, 1).unwrap();
        let s = a.prepare_state(&[PI, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let p = s.probabilities();
        assert!((p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        let a = build_checkerboard(3, 1).unwrap();
        assert!(matches!(
            a.prepare_state(&[0.0; 3]),
            Err(Error::Shape { .. })
        ));
        let h = build_tfim(4, 1.0, 1.0).unwrap();
        assert!(matches!(
            a.energy_of(&vec![0.0; a.n_params()], &h),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn zero_theta_energy() {
        for n in 2..7 {
            let a = build_checkerboard(n, 2).unwrap();
            let h = build_tfim(n, 1.0, 0.8).unwrap();
            let e = a.energy_of(&vec![0.0; a.n_params()], &h).unwrap();
            assert!((e - (n - 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn cached_prefix_matches_direct_shift() {
        let a = build_checkerboard(4, 2).unwrap();
        let h = build_tfim(4, 1.0, 1.0).unwrap();
        let theta: Vec<f64> = (0..a.n_params()).map(|k| 0.3 * k as f64 - 1.1).collect();
        let (e, g) = a.energy_and_gradient(&theta, &h).unwrap();
        assert_eq!(e, a.energy_of(&theta, &h).unwrap());
        for k in 0..a.n_params() {
            let mut p = theta.clone();
            let mut m = theta.clone();
            p[k] += FRAC_PI_2;
            m[k] -= FRAC_PI_2;
            let direct = (a.energy_of(&p, &h).unwrap() - a.energy_of(&m, &h).unwrap()) / 2.0;
            assert_eq!(g[k], direct, "slot {k}");
        }
    }
}
