//! Spin Hamiltonians as weighted sums of Pauli strings.
//!
//! Provides the transverse-field Ising and XXZ chain builders, exact energies
//! of simulated states, and a matrix-free Lanczos ground-state solver used as
//! the reference oracle for variational results.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{self, StateVector, C64};

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Bit masks describing the action `P|k> = i^y (-1)^{|k & sign|} |k ^ flip>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub flip: usize,
    pub sign: usize,
    pub y_count: u32,
}

impl PauliMasks {
    pub fn phase(&self) -> C64 {
        match self.y_count % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

/// Tensor product of per-qubit Paulis; index `q` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// `n`-qubit string with the given non-identity factors.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            s.ops[q] = p;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            flip: 0,
            sign: 0,
            y_count: 0,
        };
        for (q, p) in self.ops.iter().enumerate() {
            let bit = 1usize << q;
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.y_count += 1;
                }
                Pauli::Z => m.sign |= bit,
            }
        }
        m
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses letters `I X Y Z`; the leftmost letter acts on qubit 0.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Argument(format!("invalid Pauli letter '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ops
            .iter()
            .try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

/// Which builder produced a Hamiltonian, with its couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelTag {
    Tfim { j: f64, h: f64 },
    Xxz { j_perp: f64, j_z: f64 },
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    model: ModelTag,
    /// Terms bucketed by flip mask so that each bucket costs one pass over
    /// the amplitudes when evaluating energies.
    groups: Vec<FlipGroup>,
}

#[derive(Debug, Clone, PartialEq)]
struct FlipGroup {
    flip: usize,
    /// `(sign mask, i^y * coefficient)` per term.
    terms: Vec<(usize, C64)>,
    weight: Weight,
}

/// How a bucket's summed per-index weight is obtained.
#[derive(Debug, Clone, PartialEq)]
enum Weight {
    /// No term carries a sign mask, so every index has the same weight.
    Uniform(C64),
    /// Tabulated over all basis indices (small registers only).
    Table(Vec<C64>),
    /// Recomputed from the terms at each index.
    Terms,
}

/// Largest register whose energy weights are tabulated.
const TABLE_MAX_QUBITS: usize = 16;

impl FlipGroup {
    fn term_weight(&self, k: usize) -> C64 {
        let mut w = C64::new(0.0, 0.0);
        for &(sign, c) in &self.terms {
            if (k & sign).count_ones() & 1 == 0 {
                w += c;
            } else {
                w -= c;
            }
        }
        w
    }

    fn weight_at(&self, k: usize) -> C64 {
        match &self.weight {
            Weight::Uniform(w) => *w,
            Weight::Table(t) => t[k],
            Weight::Terms => self.term_weight(k),
        }
    }
}

fn group_terms(n_qubits: usize, terms: &[PauliTerm]) -> Vec<FlipGroup> {
    let mut groups: Vec<FlipGroup> = Vec::new();
    for t in terms {
        let m = t.string.masks();
        let entry = (m.sign, m.phase() * t.coefficient);
        match groups.iter_mut().find(|g| g.flip == m.flip) {
            Some(g) => g.terms.push(entry),
            None => groups.push(FlipGroup {
                flip: m.flip,
                terms: vec![entry],
                weight: Weight::Terms,
            }),
        }
    }
    for g in &mut groups {
        g.weight = if g.terms.iter().all(|&(sign, _)| sign == 0) {
            Weight::Uniform(g.terms.iter().map(|&(_, c)| c).sum())
        } else if n_qubits <= TABLE_MAX_QUBITS {
            Weight::Table((0..1usize << n_qubits).map(|k| g.term_weight(k)).collect())
        } else {
            Weight::Terms
        };
    }
    groups
}

/// `J Σ Z_i Z_{i+1} + h Σ X_i` on an open chain.
pub fn build_tfim(n: usize, j: f64, h: f64) -> Result<Hamiltonian> {
    build_tfim_with(n, j, h, Boundary::Open)
}

pub fn build_tfim_with(n: usize, j: f64, h: f64, boundary: Boundary) -> Result<Hamiltonian> {
    check_chain(n, boundary)?;
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::Domain(format!("TFIM requires J > 0, got {j}")));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::Domain(format!("TFIM requires h >= 0, got {h}")));
    }
    let mut terms: Vec<PauliTerm> = bonds(n, boundary)
        .map(|(a, b)| PauliTerm {
            coefficient: j,
            string: PauliString::from_sparse(n, &[(a, Pauli::Z), (b, Pauli::Z)]),
        })
        .collect();
    if h != 0.0 {
        terms.extend((0..n).map(|q| PauliTerm {
            coefficient: h,
            string: PauliString::from_sparse(n, &[(q, Pauli::X)]),
        }));
    }
    Ok(Hamiltonian::assemble(n, terms, ModelTag::Tfim { j, h }))
}

/// `-Σ [J⊥ (X_i X_{i+1} + Y_i Y_{i+1}) + Jz Z_i Z_{i+1}]` on an open chain.
pub fn build_xxz(n: usize, j_perp: f64, j_z: f64) -> Result<Hamiltonian> {
    build_xxz_with(n, j_perp, j_z, Boundary::Open)
}

pub fn build_xxz_with(n: usize, j_perp: f64, j_z: f64, boundary: Boundary) -> Result<Hamiltonian> {
    check_chain(n, boundary)?;
    if !(j_perp.is_finite() && j_z.is_finite()) {
        return Err(Error::Domain("XXZ couplings must be finite".into()));
    }
    let mut terms = Vec::new();
    for (a, b) in bonds(n, boundary) {
        for (p, c) in [(Pauli::X, -j_perp), (Pauli::Y, -j_perp), (Pauli::Z, -j_z)] {
            if c != 0.0 {
                terms.push(PauliTerm {
                    coefficient: c,
                    string: PauliString::from_sparse(n, &[(a, p), (b, p)]),
                });
            }
        }
    }
    Ok(Hamiltonian::assemble(
        n,
        terms,
        ModelTag::Xxz { j_perp, j_z },
    ))
}

fn check_chain(n: usize, boundary: Boundary) -> Result<()> {
    let min = match boundary {
        Boundary::Open => 2,
        Boundary::Periodic => 3,
    };
    if n < min {
        return Err(Error::Size(format!(
            "chain of {n} sites, need at least {min}"
        )));
    }
    if n > statevector::MAX_QUBITS {
        return Err(Error::Size(format!(
            "chain of {n} sites exceeds {} qubits",
            statevector::MAX_QUBITS
        )));
    }
    Ok(())
}

fn bonds(n: usize, boundary: Boundary) -> impl Iterator<Item = (usize, usize)> {
    let wrap = matches!(boundary, Boundary::Periodic).then_some((n - 1, 0));
    (0..n - 1).map(|i| (i, i + 1)).chain(wrap)
}

#[derive(Deserialize)]
struct TermDoc {
    coeff: f64,
    ops: String,
}

#[derive(Deserialize)]
struct HamiltonianDoc {
    n: usize,
    terms: Vec<TermDoc>,
}

impl Hamiltonian {
    fn assemble(n_qubits: usize, terms: Vec<PauliTerm>, model: ModelTag) -> Self {
        Self {
            n_qubits,
            groups: group_terms(n_qubits, &terms),
            terms,
            model,
        }
    }

    /// Builds a custom Hamiltonian from explicit terms.
    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > statevector::MAX_QUBITS {
            return Err(Error::Size(format!("{n_qubits} qubits out of range")));
        }
        for t in &terms {
            if t.string.len() != n_qubits {
                return Err(Error::Shape {
                    expected: n_qubits,
                    actual: t.string.len(),
                });
            }
            if !t.coefficient.is_finite() || t.coefficient == 0.0 {
                return Err(Error::Domain(format!(
                    "term {} has coefficient {}",
                    t.string, t.coefficient
                )));
            }
        }
        Ok(Self::assemble(n_qubits, terms, ModelTag::Custom))
    }

    /// Parses `{"n": int, "terms": [{"coeff": float, "ops": "IXZZ"}]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: HamiltonianDoc = serde_json::from_str(text)?;
        let terms = doc
            .terms
            .into_iter()
            .map(|t| {
                Ok(PauliTerm {
                    coefficient: t.coeff,
                    string: t.ops.parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(doc.n, terms)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// `<psi|H|psi>`.
    ///
    /// Every term is Hermitian, so the contributions of `k` and `k ^ flip`
    /// are complex conjugates; only the half with the lowest flipped bit
    /// clear is visited and its real part doubled.
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        self.check_state(state)?;
        let amps = state.amplitudes();
        let group_value = |g: &FlipGroup| -> f64 {
            if g.flip == 0 {
                return statevector::chunked_sum_real(amps.len(), |r| match &g.weight {
                    Weight::Uniform(w) => w.re * r.map(|k| amps[k].norm_sqr()).sum::<f64>(),
                    Weight::Table(t) => r.map(|k| t[k].re * amps[k].norm_sqr()).sum(),
                    Weight::Terms => r.map(|k| g.term_weight(k).re * amps[k].norm_sqr()).sum(),
                });
            }
            // Each pair {k, k ^ flip} is visited once, from the index whose
            // lowest flipped bit is clear; Hermiticity gives the partner.
            let below = (1usize << g.flip.trailing_zeros()) - 1;
            let spread = |j: usize| ((j & !below) << 1) | (j & below);
            let pair = |k: usize, w: C64| {
                let (a, b) = (amps[k ^ g.flip], amps[k]);
                let re = a.re * b.re + a.im * b.im;
                let im = a.re * b.im - a.im * b.re;
                2.0 * (re * w.re - im * w.im)
            };
            statevector::chunked_sum_real(amps.len() / 2, |r| match &g.weight {
                Weight::Uniform(w) => r.map(|j| pair(spread(j), *w)).sum(),
                Weight::Table(t) => r
                    .map(|j| {
                        let k = spread(j);
                        pair(k, t[k])
                    })
                    .sum(),
                Weight::Terms => r
                    .map(|j| {
                        let k = spread(j);
                        pair(k, g.term_weight(k))
                    })
                    .sum(),
            })
        };
        let values: Vec<f64> = if statevector::is_parallel_size(self.n_qubits) {
            self.groups.par_iter().map(group_value).collect()
        } else {
            self.groups.iter().map(group_value).collect()
        };
        Ok(values.into_iter().fold(0.0, |acc, v| acc + v))
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Shape {
                expected: self.n_qubits,
                actual: state.n_qubits(),
            });
        }
        Ok(())
    }

    /// Raw complex expectation; its imaginary part only carries rounding error.
    pub fn energy_complex(&self, state: &StateVector) -> Result<C64> {
        self.check_state(state)?;
        let amps = state.amplitudes();
        let group_value = |g: &FlipGroup| -> C64 {
            statevector::chunked_sum_complex(amps.len(), |r| {
                r.map(|k| amps[k ^ g.flip].conj() * amps[k] * g.weight_at(k))
                    .sum()
            })
        };
        let values: Vec<C64> = if statevector::is_parallel_size(self.n_qubits) {
            self.groups.par_iter().map(group_value).collect()
        } else {
            self.groups.iter().map(group_value).collect()
        };
        Ok(values
            .into_iter()
            .fold(C64::new(0.0, 0.0), |acc, v| acc + v))
    }

    /// `H|v>` on a raw amplitude vector of matching dimension.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        let dim = 1usize << self.n_qubits;
        if v.len() != dim {
            return Err(Error::Shape {
                expected: dim,
                actual: v.len(),
            });
        }
        let ops: Vec<(PauliMasks, C64)> = self
            .terms
            .iter()
            .map(|t| {
                let m = t.string.masks();
                (m, m.phase() * t.coefficient)
            })
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        statevector::for_each_amp(&mut out, |j, o| {
            let mut acc = C64::new(0.0, 0.0);
            for (m, c) in &ops {
                let k = j ^ m.flip;
                let term = v[k] * c;
                if (k & m.sign).count_ones() & 1 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            *o = acc;
        });
        Ok(out)
    }
}

/// Smallest eigenpair found by [`exact_ground`].
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub residual: f64,
    pub matvecs: usize,
}

pub const EXACT_MAX_QUBITS: usize = 12;
const MATVEC_CAP: usize = 10_000;
const RESIDUAL_TOL: f64 = 1e-8;
const KRYLOV_MAX: usize = 80;

/// Lowest eigenvalue and a unit eigenvector via restarted Lanczos with full
/// reorthogonalization, using only `H|v>` products.
///
/// For a degenerate ground space any vector in that space may be returned.
pub fn exact_ground(ham: &Hamiltonian) -> Result<GroundState> {
    let n = ham.n_qubits();
    if n > EXACT_MAX_QUBITS {
        return Err(Error::Size(format!(
            "exact ground state limited to {EXACT_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let krylov = dim.min(KRYLOV_MAX);

    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_205e_ed00_0001);
    let mut start: Vec<C64> = (0..dim)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    normalize(&mut start);

    let mut matvecs = 0;
    let mut residual = f64::INFINITY;
    while matvecs < MATVEC_CAP {
        let mut basis: Vec<Vec<C64>> = vec![start];
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let coeffs = loop {
            let j = basis.len() - 1;
            let mut w = ham.apply(&basis[j])?;
            matvecs += 1;
            alpha.push(dot(&basis[j], &w).re);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let next = norm(&w);
            let (_, s) = smallest_tridiagonal(&alpha, &beta);
            let estimate = next * s[j].abs();
            if estimate < 0.1 * RESIDUAL_TOL
                || next < 1e-13
                || basis.len() == krylov
                || matvecs >= MATVEC_CAP
            {
                break s;
            }
            beta.push(next);
            w.iter_mut().for_each(|x| *x /= next);
            basis.push(w);
        };

        let mut ritz = vec![C64::new(0.0, 0.0); dim];
        for (b, &c) in basis.iter().zip(&coeffs) {
            ritz.iter_mut().zip(b).for_each(|(r, x)| *r += x * c);
        }
        normalize(&mut ritz);
        let hv = ham.apply(&ritz)?;
        matvecs += 1;
        let energy = dot(&ritz, &hv).re;
        residual = hv
            .iter()
            .zip(&ritz)
            .map(|(h, r)| (h - r * energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= RESIDUAL_TOL {
            return Ok(GroundState {
                energy,
                state: StateVector::from_amplitudes(ritz)?,
                residual,
                matvecs,
            });
        }
        start = ritz;
    }
    Err(Error::Convergence { matvecs, residual })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [C64]) {
    let n = norm(a);
    a.iter_mut().for_each(|x| *x /= n);
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal `alpha`
/// and off-diagonal `beta`.
fn smallest_tridiagonal(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (val, eig.eigenvectors.column(idx).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfim_construction() {
        let h = build_tfim(2, 1.0, 0.0).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].coefficient, 1.0);
        assert_eq!(h.terms()[0].string.to_string(), "ZZ");

        let h = build_tfim(3, 1.0, 0.5).unwrap();
        let coeffs: Vec<f64> = h.terms().iter().map(|t| t.coefficient).collect();
        assert_eq!(coeffs, vec![1.0, 1.0, 0.5, 0.5, 0.5]);
        let strings: Vec<String> = h.terms().iter().map(|t| t.string.to_string()).collect();
        assert_eq!(strings, vec!["ZZI", "IZZ", "XII", "IXI", "IIX"]);
    }

    #[test]
    fn tfim_errors() {
        assert!(matches!(build_tfim(1, 1.0, 1.0), Err(Error::Size(_))));
        assert!(matches!(build_tfim(4, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(build_tfim(4, -1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn xxz_construction() {
        let h = build_xxz(2, 1.0, -1.0).unwrap();
        let got: Vec<(f64, String)> = h
            .terms()
            .iter()
            .map(|t| (t.coefficient, t.string.to_string()))
            .collect();
        assert_eq!(
            got,
            vec![(-1.0, "XX".into()), (-1.0, "YY".into()), (1.0, "ZZ".into())]
        );
        assert!(matches!(build_xxz(1, 1.0, -1.0), Err(Error::Size(_))));
    }

    #[test]
    fn term_counts() {
        for n in 2..10 {
            assert_eq!(build_tfim(n, 1.0, 0.7).unwrap().terms().len(), 2 * n - 1);
            assert_eq!(build_xxz(n, 1.0, -0.4).unwrap().terms().len(), 3 * (n - 1));
            assert!(build_xxz(n, 1.0, -0.4).unwrap().terms().len() <= 3 * n);
        }
        assert_eq!(
            build_tfim_with(4, 1.0, 0.5, Boundary::Periodic)
                .unwrap()
                .terms()
                .len(),
            8
        );
    }

    #[test]
    fn energy_of_basis_state() {
        let h = build_tfim(4, 1.0, 0.5).unwrap();
        let s = StateVector::new_zero(4).unwrap();
        assert!((h.energy(&s).unwrap() - 3.0).abs() < 1e-14);
        let wrong = StateVector::new_zero(3).unwrap();
        assert!(matches!(h.energy(&wrong), Err(Error::Shape { .. })));
    }

    #[test]
    fn exact_small_chains() {
        let g = exact_ground(&build_tfim(2, 1.0, 0.0).unwrap()).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-10);
        let g = exact_ground(&build_tfim(2, 1.0, 1.0).unwrap()).unwrap();
        assert!((g.energy + 5f64.sqrt()).abs() < 1e-10);
        assert!(g.residual <= 1e-8);
        let g = exact_ground(&build_xxz(2, 1.0, -1.0).unwrap()).unwrap();
        assert!((g.energy + 3.0).abs() < 1e-10);
        let g = exact_ground(&build_xxz(2, 0.0, -1.0).unwrap()).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_size_limit() {
        let h = build_tfim(13, 1.0, 1.0).unwrap();
        assert!(matches!(exact_ground(&h), Err(Error::Size(_))));
    }

    #[test]
    fn xxz_two_site_ground_state_is_triplet_zero() {
        let g = exact_ground(&build_xxz(2, 1.0, -1.0).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let target = StateVector::from_amplitudes(vec![
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!((g.state.fidelity(&target).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn json_round() {
        let h = Hamiltonian::from_json_str(
            r#"{"n": 3, "terms": [{"coeff": 0.5, "ops": "XIZ"}, {"coeff": -1, "ops": "YYI"}]}"#,
        )
        .unwrap();
        assert_eq!(h.model(), ModelTag::Custom);
        assert_eq!(h.terms()[0].string.ops(), &[Pauli::X, Pauli::I, Pauli::Z]);
        assert!(
            Hamiltonian::from_json_str(r#"{"n": 3, "terms": [{"coeff": 1, "ops": "XX"}]}"#)
                .is_err()
        );
        assert!(
            Hamiltonian::from_json_str(r#"{"n": 2, "terms": [{"coeff": 1, "ops": "XQ"}]}"#)
                .is_err()
        );
    }
}
