//! Dense state-vector engine.
//!
//! States are immutable values: every operation returns a new [`StateVector`].
//! Qubit 0 is the most significant bit of the basis index.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bits;
use crate::diagonal::DiagonalGate;
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};

/// Normalization tolerance enforced after every operation.
pub const NORM_TOL: f64 = 1e-9;
/// Probability below which a forced measurement branch is rejected.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;
/// Schmidt probabilities below this contribute nothing to the entropy.
pub const EIGEN_CUTOFF: f64 = 1e-12;

const DEFAULT_MAX_QUBITS: usize = 16;

/// Register size cap. `MODNET_MAX_QUBITS` overrides the default of 16.
pub fn max_qubits() -> usize {
    static MAX: OnceLock<usize> = OnceLock::new();
    *MAX.get_or_init(|| {
        std::env::var("MODNET_MAX_QUBITS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| v >= 1 && v < usize::BITS as usize)
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    if n > max_qubits() {
        return Err(Error::TooManyQubits(n, max_qubits()));
    }
    Ok(())
}

fn check_targets(n: usize, targets: &[usize]) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct MeasurementResult {
    pub outcome: u8,
    /// Squared norm of the projected branch before renormalization.
    pub probability: f64,
    pub post_state: StateVector,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        if index >= 1 << n {
            return Err(Error::BasisIndex { index, n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Computational basis state from a bitstring such as `"010"`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let b = bits::parse(s)?;
        Self::basis(b.len(), bits::to_index(&b)?)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        check_size(n)?;
        let a = Complex64::new((1u64 << n) as f64, 0.0).sqrt().inv();
        Ok(Self {
            n,
            amps: vec![a; 1 << n],
        })
    }

    /// Builds a state from amplitudes whose norm is within [`NORM_TOL`] of one.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, amps }.renormalized())
    }

    /// Builds a state by normalizing arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_size(n)?;
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn renormalized(mut self) -> Self {
        let norm = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= norm);
        self
    }

    /// `self ⊗ other`; the qubits of `self` come first.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        check_size(self.n + other.n)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            n: self.n + other.n,
            amps,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply_gate(&self, matrix: &Matrix, targets: &[usize]) -> Result<Self> {
        check_targets(self.n, targets)?;
        let k = targets.len();
        if k == 0 {
            return Err(Error::EmptyRegister);
        }
        let dim = 1usize << k;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::MatrixDimension {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let dev = gates::unitarity_deviation(matrix);
        if dev >= NORM_TOL {
            return Err(Error::NotUnitary(dev));
        }
        let offsets: Vec<usize> = (0..dim)
            .map(|s| bits::scatter(s, targets, self.n))
            .collect();
        let tmask = bits::mask_of(self.n, targets);
        let mut out = self.amps.clone();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in (0..self.amps.len()).filter(|i| i & tmask == 0) {
            for (s, off) in offsets.iter().enumerate() {
                local[s] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                out[base | off] = (0..dim).map(|c| matrix[(r, c)] * local[c]).sum();
            }
        }
        Ok(Self {
            n: self.n,
            amps: out,
        }
        .renormalized())
    }

    /// Multiplies each amplitude `i` by `exp(i alpha_{i'})` where `i'` is the
    /// restriction of `i` to `targets`.
    pub fn apply_diagonal(&self, gate: &DiagonalGate, targets: &[usize]) -> Result<Self> {
        if gate.arity() != targets.len() {
            return Err(Error::ArityMismatch {
                gate: gate.arity(),
                targets: targets.len(),
            });
        }
        check_targets(self.n, targets)?;
        let alpha = gate.phases();
        Ok(self.map_phases(|i| alpha[bits::gather(i, targets, self.n)]))
    }

    /// Multiplies amplitude `i` by `exp(i phase(i))`.
    pub(crate) fn map_phases(&self, phase: impl Fn(usize) -> f64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| a * Complex64::from_polar(1.0, phase(i)))
            .collect();
        Self { n: self.n, amps }
    }

    /// Maps each basis index `i` to `perm(i)`; `perm` must be a bijection.
    pub(crate) fn permute_basis(&self, perm: impl Fn(usize) -> usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            amps[perm(i)] = *a;
        }
        Self { n: self.n, amps }
    }

    /// Probability of obtaining `outcome` when measuring `qubit`.
    pub fn branch_probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        check_targets(self.n, &[qubit])?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| bits::bit(*i, self.n, qubit) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective computational-basis measurement of one qubit. The measured
    /// qubit stays in the register, collapsed onto the outcome.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        forced: Option<u8>,
        rng: &mut R,
    ) -> Result<MeasurementResult> {
        let p1 = self.branch_probability(qubit, 1)?;
        let p0 = (1.0 - p1).max(0.0);
        let outcome = match forced {
            Some(b) if b > 1 => return Err(Error::InvalidBitstring(b.to_string())),
            Some(b) => b,
            None => {
                if p1 < MIN_BRANCH_PROBABILITY {
                    0
                } else if p0 < MIN_BRANCH_PROBABILITY {
                    1
                } else {
                    u8::from(rng.random::<f64>() >= p0)
                }
            }
        };
        let probability = if outcome == 1 { p1 } else { p0 };
        if probability < MIN_BRANCH_PROBABILITY {
            return Err(Error::ImpossibleOutcome {
                qubit,
                outcome,
                probability,
            });
        }
        let scale = probability.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if bits::bit(i, self.n, qubit) == outcome {
                    a / scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(MeasurementResult {
            outcome,
            probability,
            post_state: Self { n: self.n, amps },
        })
    }

    /// Matrix `M[a][b]` of amplitudes with row index over `part` and column
    /// index over the complement.
    fn bipartite_matrix(&self, part: &[usize]) -> Result<(DMatrix<Complex64>, Vec<usize>)> {
        check_targets(self.n, part)?;
        if part.is_empty() || part.len() == self.n {
            return Err(Error::InvalidBipartition);
        }
        let rest: Vec<usize> = (0..self.n).filter(|q| !part.contains(q)).collect();
        let m = DMatrix::from_fn(1 << part.len(), 1 << rest.len(), |r, c| {
            self.amps[bits::scatter(r, part, self.n) | bits::scatter(c, &rest, self.n)]
        });
        Ok((m, rest))
    }

    /// Von Neumann entropy (base 2) of the reduced state on `part`, computed
    /// from the Schmidt coefficients.
    pub fn entanglement_entropy(&self, part: &[usize]) -> Result<f64> {
        let (m, _) = self.bipartite_matrix(part)?;
        let sv = m.singular_values();
        Ok(sv
            .iter()
            .map(|s| s * s)
            .filter(|&p| p > EIGEN_CUTOFF)
            .map(|p| -p * p.log2())
            .sum::<f64>()
            .max(0.0))
    }

    /// Returns the pure state of `keep` (in the given order) when the register
    /// factorizes as `keep ⊗ rest`; the global phase of the result is arbitrary.
    pub fn extract(&self, keep: &[usize]) -> Result<StateVector> {
        check_targets(self.n, keep)?;
        if keep.len() == self.n {
            let perm: Vec<usize> = (0..self.amps.len())
                .map(|i| bits::gather(i, keep, self.n))
                .collect();
            return Ok(self.permute_basis(|i| perm[i]));
        }
        let (m, _) = self.bipartite_matrix(keep)?;
        // Column with the largest weight fixes the kept factor.
        let best = (0..m.ncols())
            .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()))
            .unwrap_or(0);
        let col = m.column(best).into_owned();
        let a = &col / Complex64::new(col.norm(), 0.0);
        // Rest factor b_c = <a|M[:, c]>; the residual must vanish.
        let b = a.adjoint() * &m;
        let residual = (&m - &a * &b).norm();
        if residual > 1e-7 {
            return Err(Error::NotProduct(keep.to_vec()));
        }
        Self::normalized(a.iter().copied().collect())
    }

    /// Resets a qubit known to be in a computational basis state to `|0>`.
    pub(crate) fn reset_known(&self, qubit: usize, value: u8) -> Result<Self> {
        if value == 0 {
            Ok(self.clone())
        } else {
            self.apply_gate(&gates::x(), &[qubit])
        }
    }
}

/// `|<a|b>|^2`.
pub fn fidelity_up_to_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    /// Reduced density matrix by explicit partial trace.
    fn reduced(state: &StateVector, part: &[usize]) -> DMatrix<Complex64> {
        let n = state.n_qubits();
        let rest: Vec<usize> = (0..n).filter(|q| !part.contains(q)).collect();
        let d = 1 << part.len();
        DMatrix::from_fn(d, d, |r, c| {
            (0..1usize << rest.len())
                .map(|e| {
                    let i = bits::scatter(r, part, n) | bits::scatter(e, &rest, n);
                    let j = bits::scatter(c, part, n) | bits::scatter(e, &rest, n);
                    state.amplitude(i) * state.amplitude(j).conj()
                })
                .sum()
        })
    }

    fn eigen_entropy(state: &StateVector, part: &[usize]) -> f64 {
        let rho = reduced(state, part);
        rho.symmetric_eigenvalues()
            .iter()
            .filter(|&&p| p > 1e-12)
            .map(|p| -p * p.log2())
            .sum()
    }

    #[test]
    fn basis_states() {
        let s = StateVector::from_bitstring("0").unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        let s = StateVector::from_bitstring("11").unwrap();
        assert_eq!(s.amplitude(3), Complex64::new(1.0, 0.0));
        let s = StateVector::from_bitstring("010").unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        for q in 0..3 {
            assert_eq!(s.entanglement_entropy(&[q]).unwrap(), 0.0);
        }
        assert!(StateVector::basis(max_qubits() + 1, 0).is_err());
        assert!(StateVector::basis(2, 4).is_err());
    }

    #[test]
    fn hadamard_and_cx_involution() {
        let plus = StateVector::zero(1).unwrap().apply_gate(&gates::h(), &[0]).unwrap();
        assert!((fidelity_up_to_phase(&plus, &StateVector::plus(1).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let psi = StateVector::random(2, &mut rng()).unwrap();
        let back = psi
            .apply_gate(&gates::cx(), &[0, 1])
            .unwrap()
            .apply_gate(&gates::cx(), &[0, 1])
            .unwrap();
        assert!(fidelity_up_to_phase(&psi, &back).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn gate_errors() {
        let psi = StateVector::zero(2).unwrap();
        let bad = Matrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(psi.apply_gate(&bad, &[0]), Err(Error::NotUnitary(_))));
        assert!(matches!(psi.apply_gate(&gates::cx(), &[0, 0]), Err(Error::DuplicateTarget(0))));
        assert!(matches!(psi.apply_gate(&gates::h(), &[2]), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(
            psi.apply_diagonal(&DiagonalGate::cz(), &[0]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn random_circuit_matches_matrix_chain() {
        let mut r = rng();
        let psi = StateVector::random(3, &mut r).unwrap();
        let steps: Vec<(Matrix, Vec<usize>)> = vec![
            (gates::h(), vec![1]),
            (gates::cx(), vec![2, 0]),
            (gates::x_rotation(0.37), vec![0]),
            (gates::cz(), vec![1, 2]),
            (gates::swap(), vec![0, 2]),
            (gates::ccx(), vec![2, 1, 0]),
        ];
        let mut state = psi.clone();
        let mut total = gates::identity(3);
        for (m, t) in &steps {
            state = state.apply_gate(m, t).unwrap();
            total = gates::embed(m, t, 3) * total;
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let oracle = StateVector::from_amplitudes((total * v).iter().copied().collect()).unwrap();
        assert!(fidelity_up_to_phase(&state, &oracle).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn diagonal_matches_dense() {
        let mut r = rng();
        for n in 1..=4 {
            let alpha: Vec<f64> = (0..1 << n).map(|_| r.random::<f64>() * 6.0 - 3.0).collect();
            let g = DiagonalGate::new(alpha).unwrap();
            let psi = StateVector::random(n, &mut r).unwrap();
            let targets: Vec<usize> = (0..n).rev().collect();
            let a = psi.apply_diagonal(&g, &targets).unwrap();
            let b = psi.apply_gate(&g.matrix(), &targets).unwrap();
            assert!(fidelity_up_to_phase(&a, &b).unwrap() >= 1.0 - 1e-12);
        }
        let s11 = StateVector::from_bitstring("11").unwrap();
        let out = s11.apply_diagonal(&DiagonalGate::cz(), &[0, 1]).unwrap();
        assert!((out.amplitude(3) + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn measurement_branches() {
        let plus = StateVector::plus(1).unwrap();
        let m = plus.measure(0, Some(0), &mut rng()).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-15);
        assert!((m.post_state.norm() - 1.0).abs() < 1e-12);
        let zero = StateVector::zero(1).unwrap();
        assert!(matches!(
            zero.measure(0, Some(1), &mut rng()),
            Err(Error::ImpossibleOutcome { .. })
        ));
        let psi = StateVector::random(3, &mut rng()).unwrap();
        for q in 0..3 {
            let p0 = psi.measure(q, Some(0), &mut rng()).unwrap().probability;
            let p1 = psi.measure(q, Some(1), &mut rng()).unwrap().probability;
            assert!((p0 + p1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let plus = StateVector::plus(1).unwrap();
        assert_eq!(fidelity_up_to_phase(&zero, &one).unwrap(), 0.0);
        assert!((fidelity_up_to_phase(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
        let psi = StateVector::random(2, &mut rng()).unwrap();
        let phased = psi.map_phases(|_| 1.234);
        assert!((fidelity_up_to_phase(&psi, &phased).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity_up_to_phase(&zero, &psi).is_err());
    }

    #[test]
    fn entropy_bell_and_rotation() {
        let bell = StateVector::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        assert!((bell.entanglement_entropy(&[0]).unwrap() - 1.0).abs() < 1e-12);
        let g = crate::diagonal::gate_state(&DiagonalGate::zz(0.3)).unwrap();
        let x = 0.3f64.cos().powi(2);
        let expected = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert!((g.entanglement_entropy(&[0]).unwrap() - expected).abs() < 1e-12);
        assert!((eigen_entropy(&g, &[0]) - expected).abs() < 1e-12);
        assert!(bell.entanglement_entropy(&[]).is_err());
        assert!(bell.entanglement_entropy(&[0, 1]).is_err());
    }

    #[test]
    fn entropy_matches_partial_trace_and_is_symmetric() {
        let mut r = rng();
        for _ in 0..10 {
            let psi = StateVector::random(4, &mut r).unwrap();
            for part in [vec![0], vec![1, 3], vec![0, 1, 2]] {
                let rest: Vec<usize> = (0..4).filter(|q| !part.contains(q)).collect();
                let e = psi.entanglement_entropy(&part).unwrap();
                assert!((e - eigen_entropy(&psi, &part)).abs() < 1e-9);
                assert!((e - psi.entanglement_entropy(&rest).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extract_product_factor() {
        let mut r = rng();
        let a = StateVector::random(2, &mut r).unwrap();
        let b = StateVector::random(1, &mut r).unwrap();
        let joint = b.tensor(&a).unwrap();
        let got = joint.extract(&[1, 2]).unwrap();
        assert!(fidelity_up_to_phase(&a, &got).unwrap() > 1.0 - 1e-12);
        let bell = crate::diagonal::gate_state(&DiagonalGate::cz()).unwrap();
        assert!(matches!(bell.extract(&[0]), Err(Error::NotProduct(_))));
    }
}
