//! Diagonal gates, their multiqubit Z-rotation (Walsh) spectra, the Clifford
//! correction calculus and the resource states built from them.
//!
//! A diagonal gate `Λ = Σ_i exp(i α_i) |i><i|` factorizes as
//! `Π_j exp(i θ_j Z^j)` with `θ_j = 2^-n Σ_i (-1)^(i.j) α_i`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};
use crate::pauli::{self, PauliString};
use crate::statevec::StateVector;

/// Default tolerance for Clifford detection.
pub const CLIFFORD_TOL: f64 = 1e-9;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Distance from `a` to the nearest integer multiple of `step`.
pub fn distance_to_multiple(a: f64, step: f64) -> f64 {
    let r = a.rem_euclid(step);
    r.min(step - r)
}

/// In-place unnormalized Walsh-Hadamard transform, `out_j = Σ_i (-1)^(i.j) in_i`.
fn fwht(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalGate {
    n: usize,
    alpha: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    n: usize,
    theta: Vec<f64>,
}

impl DiagonalGate {
    /// Phases are wrapped into `(-π, π]`.
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        let len = alpha.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            alpha: alpha.into_iter().map(wrap_angle).collect(),
        })
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Self {
        Self {
            n,
            alpha: (0..1 << n).map(|i| wrap_angle(f(i))).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |_| 0.0)
    }

    /// `exp(i π |11><11|)`.
    pub fn cz() -> Self {
        Self::from_fn(2, |i| if i == 3 { PI } else { 0.0 })
    }

    /// `exp(i θ Z⊗Z)`.
    pub fn zz(theta: f64) -> Self {
        Self::rotation(2, 0b11, theta)
    }

    /// `R^mask(θ) = exp(i θ Z^mask)`.
    pub fn rotation(n: usize, mask: usize, theta: f64) -> Self {
        Self::from_fn(n, |i| bits::sign(i, mask) * theta)
    }

    /// `exp(i φ |index><index|)`.
    pub fn projector_phase(n: usize, index: usize, phi: f64) -> Self {
        Self::from_fn(n, |i| if i == index { phi } else { 0.0 })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn phases(&self) -> &[f64] {
        &self.alpha
    }

    /// Operator product `self * other`.
    pub fn compose(&self, other: &DiagonalGate) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                gate: other.n,
                targets: self.n,
            });
        }
        Ok(Self::from_fn(self.n, |i| self.alpha[i] + other.alpha[i]))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i| -self.alpha[i])
    }

    /// The same gate acting on `targets` of an `n`-qubit register.
    pub fn embed(&self, n: usize, targets: &[usize]) -> Result<Self> {
        if targets.len() != self.n {
            return Err(Error::ArityMismatch {
                gate: self.n,
                targets: targets.len(),
            });
        }
        if let Some(&q) = targets.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        Ok(Self::from_fn(n, |i| self.alpha[bits::gather(i, targets, n)]))
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
            1 << self.n,
            self.alpha.iter().map(|&a| Complex64::from_polar(1.0, a)),
        ))
    }

    /// Largest phase discrepancy against `other` after removing the best
    /// global phase.
    pub fn distance_up_to_phase(&self, other: &DiagonalGate) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let diffs: Vec<Complex64> = self
            .alpha
            .iter()
            .zip(&other.alpha)
            .map(|(a, b)| Complex64::from_polar(1.0, a - b))
            .collect();
        let mean: Complex64 = diffs.iter().sum();
        let phase = if mean.norm() > 0.0 {
            mean / mean.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        diffs.iter().map(|d| (d - phase).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq_up_to_phase(&self, other: &DiagonalGate, tol: f64) -> bool {
        self.distance_up_to_phase(other) < tol
    }
}

impl WalshSpectrum {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let len = theta.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            theta,
        })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// Angles indexed by Z-mask; entry 0 is a global phase.
    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn angle(&self, mask: usize) -> f64 {
        self.theta[mask]
    }

    /// Every non-global angle is within `tol` of a multiple of π/4.
    pub fn all_quarter_turns(&self, tol: f64) -> bool {
        self.theta
            .iter()
            .skip(1)
            .all(|&t| distance_to_multiple(t, FRAC_PI_4) <= tol)
    }

    /// Masks with a non-negligible angle, excluding the global phase.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (1..self.theta.len())
            .filter(|&j| distance_to_multiple(self.theta[j], PI) > tol)
            .collect()
    }
}

pub fn walsh_spectrum(g: &DiagonalGate) -> WalshSpectrum {
    let mut theta = g.alpha.clone();
    fwht(&mut theta);
    let scale = (1u64 << g.n) as f64;
    theta.iter_mut().for_each(|t| *t /= scale);
    WalshSpectrum { n: g.n, theta }
}

pub fn from_rotations(s: &WalshSpectrum) -> DiagonalGate {
    let mut alpha = s.theta.clone();
    fwht(&mut alpha);
    DiagonalGate::from_fn(s.n, |i| alpha[i])
}

/// Recognizes `diag(exp(i δ_i))` as a Pauli string `i^p Z^z`.
fn diagonal_pauli(n: usize, delta: &[f64], tol: f64) -> Option<PauliString> {
    let phase_exp = pauli::quarter_turn(Complex64::from_polar(1.0, delta[0]), tol)?;
    let z_mask = (0..n).fold(0usize, |acc, q| {
        let e = bits::qubit_mask(n, q);
        if distance_to_multiple(delta[e] - delta[0], 2.0 * PI) > FRAC_PI_2 {
            acc | e
        } else {
            acc
        }
    });
    let consistent = delta.iter().enumerate().all(|(i, d)| {
        let expect = if bits::parity(i & z_mask) == 1 { PI } else { 0.0 };
        distance_to_multiple(d - delta[0] - expect, 2.0 * PI) <= tol
    });
    consistent.then_some(PauliString {
        n,
        phase_exp,
        x_mask: 0,
        z_mask,
    })
}

/// `Λ X^k Λ† X^k` as a Pauli string, when it is one.
fn correction_for(g: &DiagonalGate, k: usize, tol: f64) -> Option<PauliString> {
    let delta: Vec<f64> = (0..1 << g.n).map(|i| g.alpha[i] - g.alpha[i ^ k]).collect();
    diagonal_pauli(g.n, &delta, tol)
}

/// Clifford test for diagonal gates: `Λ X_q Λ†` must be a Pauli string for
/// every qubit `q`. For up to three qubits this agrees with asking that every
/// Walsh angle be a multiple of π/4; for more qubits the Walsh angles of the
/// wrapped phase vector may carry an offset of `2π/2^n` that the conjugation
/// test does not see.
pub fn is_clifford(g: &DiagonalGate, tol: f64) -> bool {
    (0..g.n).all(|q| correction_for(g, bits::qubit_mask(g.n, q), tol).is_some())
}

/// `X^k Λ X^k`, i.e. `α'_i = α_{i ⊕ k}`.
pub fn conjugate_by_x(g: &DiagonalGate, k: usize) -> Result<DiagonalGate> {
    if k >= 1 << g.n {
        return Err(Error::BasisIndex { index: k, n: g.n });
    }
    Ok(DiagonalGate::from_fn(g.n, |i| g.alpha[i ^ k]))
}

/// Pauli correction `C^(k) = Λ X^k Λ† X^k`, so that
/// `C^(k) · X^k Λ X^k = Λ` exactly (global phase included).
pub fn clifford_correction(g: &DiagonalGate, k: usize) -> Result<PauliString> {
    if k >= 1 << g.n {
        return Err(Error::BasisIndex { index: k, n: g.n });
    }
    if !is_clifford(g, CLIFFORD_TOL) {
        return Err(Error::NotClifford);
    }
    correction_for(g, k, 1e-7).ok_or(Error::NotClifford)
}

/// `|Λ> = Λ |+>^n`.
pub fn gate_state(g: &DiagonalGate) -> Result<StateVector> {
    StateVector::plus(g.n)?.apply_diagonal(g, &(0..g.n).collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub angle: f64,
}

/// Interaction graph with per-edge `exp(i θ Z_a Z_b)` angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    n: usize,
    edges: Vec<Edge>,
}

impl GraphSpec {
    /// Every edge carries the Clifford angle π/4.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::uniform(n, edges, FRAC_PI_4)
    }

    pub fn uniform(n: usize, edges: &[(usize, usize)], angle: f64) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(a, b)| (a, b, angle)).collect();
        Self::with_angles(n, &weighted)
    }

    pub fn with_angles(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut out: Vec<Edge> = Vec::with_capacity(edges.len());
        for &(a, b, angle) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for {n} vertices")));
            }
            let (a, b) = (a.min(b), a.max(b));
            if out.iter().any(|e| e.a == a && e.b == b) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
            out.push(Edge { a, b, angle });
        }
        Ok(Self { n, edges: out })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices touched by at least one edge, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| self.edges.iter().any(|e| e.a == v || e.b == v))
            .collect()
    }
}

/// `G = exp(i Σ_(a,b) θ_ab Z_a Z_b)`.
pub fn graph_gate(spec: &GraphSpec) -> DiagonalGate {
    let n = spec.n;
    DiagonalGate::from_fn(n, |i| {
        spec.edges
            .iter()
            .map(|e| bits::sign(i, bits::qubit_mask(n, e.a) | bits::qubit_mask(n, e.b)) * e.angle)
            .sum()
    })
}

/// Star-graph GHZ state `Π_{j>0} CZ_{0j} |+>^n`.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("GHZ state needs n >= 2, got {n}")));
    }
    let g = DiagonalGate::from_fn(n, |i| {
        if bits::bit(i, n, 0) == 1 && (i & !bits::qubit_mask(n, 0)).count_ones() % 2 == 1 {
            PI
        } else {
            0.0
        }
    });
    gate_state(&g)
}

/// `2^(-n/2) Σ_k |k>_M ⊗ U|k>_M'` with the `M` qubits first.
pub fn choi_state(u: &Matrix) -> Result<StateVector> {
    let n = gates::arity(u).ok_or(Error::NotPowerOfTwo(u.nrows()))?;
    let dev = gates::unitarity_deviation(u);
    if dev >= 1e-9 {
        return Err(Error::NotUnitary(dev));
    }
    let dim = 1usize << n;
    let scale = (dim as f64).sqrt();
    let amps = (0..dim * dim)
        .map(|idx| u[(idx % dim, idx / dim)] / scale)
        .collect();
    StateVector::from_amplitudes(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::fidelity_up_to_phase;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(4^n) spectrum.
    fn spectrum_oracle(alpha: &[f64]) -> Vec<f64> {
        let d = alpha.len();
        (0..d)
            .map(|j| (0..d).map(|i| bits::sign(i, j) * alpha[i]).sum::<f64>() / d as f64)
            .collect()
    }

    fn close_mod_2pi(a: f64, b: f64, tol: f64) -> bool {
        distance_to_multiple(a - b, 2.0 * PI) <= tol
    }

    #[test]
    fn cz_spectrum() {
        let s = walsh_spectrum(&DiagonalGate::cz());
        let expected = [FRAC_PI_4, -FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4];
        for (a, b) in s.angles().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(spectrum_oracle(DiagonalGate::cz().phases()), expected.to_vec());
        let back = from_rotations(&s);
        assert!(gates::distance_up_to_phase(&back.matrix(), &gates::cz()) < 1e-12);
        assert!(walsh_spectrum(&DiagonalGate::identity(3)).angles().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn single_rotation_from_spectrum() {
        let mut theta = vec![0.0; 4];
        theta[3] = FRAC_PI_4;
        let g = from_rotations(&WalshSpectrum::new(theta).unwrap());
        let expected = [FRAC_PI_4, -FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4];
        for (a, b) in g.phases().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(from_rotations(&WalshSpectrum::new(vec![0.0; 8]).unwrap()), DiagonalGate::identity(3));
    }

    #[test]
    fn clifford_detection() {
        assert!(is_clifford(&DiagonalGate::cz(), CLIFFORD_TOL));
        assert!(!is_clifford(&DiagonalGate::zz(0.3), CLIFFORD_TOL));
        assert!(!is_clifford(&DiagonalGate::projector_phase(3, 0, PI), CLIFFORD_TOL));
        assert!(is_clifford(&DiagonalGate::rotation(3, 0b111, FRAC_PI_4), CLIFFORD_TOL));
        assert!(is_clifford(&DiagonalGate::rotation(2, 0b01, FRAC_PI_4), CLIFFORD_TOL));
        assert!(!is_clifford(&DiagonalGate::rotation(2, 0b01, PI / 8.0), CLIFFORD_TOL));
    }

    #[test]
    fn clifford_criteria_agree_up_to_three_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for _ in 0..50 {
                let quarter = rng.random_bool(0.5);
                let theta: Vec<f64> = (0..1 << n)
                    .map(|_| {
                        let k = rng.random_range(-4i32..=4) as f64 * FRAC_PI_4;
                        if quarter { k } else { k + rng.random_range(0.05..0.7) }
                    })
                    .collect();
                let g = from_rotations(&WalshSpectrum::new(theta).unwrap());
                let literal = walsh_spectrum(&g).all_quarter_turns(1e-9);
                assert_eq!(is_clifford(&g, CLIFFORD_TOL), literal);
            }
        }
    }

    #[test]
    fn wrapped_four_qubit_clifford_detected() {
        // Weight-1 and weight-2 rotations at π/4: α_0 = 5π/2 wraps, which
        // shifts every Walsh angle by π/8.
        let theta: Vec<f64> = (0..16usize)
            .map(|j| if (1..=2).contains(&j.count_ones()) { FRAC_PI_4 } else { 0.0 })
            .collect();
        let g = from_rotations(&WalshSpectrum::new(theta).unwrap());
        assert!(!walsh_spectrum(&g).all_quarter_turns(1e-9));
        assert!(is_clifford(&g, CLIFFORD_TOL));
    }

    #[test]
    fn conjugation_reverses_rotation() {
        let g = DiagonalGate::zz(0.3);
        assert_eq!(conjugate_by_x(&g, 0).unwrap(), g);
        let flipped = conjugate_by_x(&g, 0b10).unwrap();
        assert!(flipped.approx_eq_up_to_phase(&DiagonalGate::zz(-0.3), 1e-12));
        assert!(conjugate_by_x(&g, 4).is_err());
    }

    #[test]
    fn cz_correction_is_z_on_second_qubit() {
        // C = CZ X_0 CZ† X_0: qubit 0 flipped, so Z lands on qubit 1.
        let c = clifford_correction(&DiagonalGate::cz(), 0b10).unwrap();
        assert_eq!(c.z_mask, 0b01);
        assert_eq!(c.x_mask, 0);
        let byproduct = gates::x().kronecker(&gates::identity(1));
        let got = c.matrix() * &byproduct * gates::cz() * &byproduct;
        assert!(gates::distance_up_to_phase(&got, &gates::cz()) < 1e-12);
        assert!(clifford_correction(&DiagonalGate::cz(), 0).unwrap().is_identity());
        assert!(matches!(clifford_correction(&DiagonalGate::zz(0.3), 1), Err(Error::NotClifford)));
    }

    #[test]
    fn graph_correction_matches_edge_rule() {
        let spec = GraphSpec::new(4, &[(0, 2), (0, 3), (1, 3), (2, 3)]).unwrap();
        let g = graph_gate(&spec);
        for k in 0..16usize {
            let c = clifford_correction(&g, k).unwrap();
            let expected = spec.edges().iter().fold(0usize, |acc, e| {
                if bits::bit(k, 4, e.a) ^ bits::bit(k, 4, e.b) == 1 {
                    acc ^ bits::mask_of(4, &[e.a, e.b])
                } else {
                    acc
                }
            });
            assert_eq!(c.z_mask, expected);
            let xk = PauliString::x(4, k).matrix();
            let fixed = c.matrix() * &xk * g.matrix() * &xk;
            assert!(gates::distance_up_to_phase(&fixed, &g.matrix()) < 1e-12);
        }
    }

    #[test]
    fn graph_gate_edges() {
        let single = graph_gate(&GraphSpec::new(2, &[(0, 1)]).unwrap());
        assert!(single.approx_eq_up_to_phase(&DiagonalGate::zz(FRAC_PI_4), 1e-12));
        let s = walsh_spectrum(&single);
        assert!((s.angle(0b11) - FRAC_PI_4).abs() < 1e-12);
        assert_eq!(graph_gate(&GraphSpec::new(3, &[]).unwrap()), DiagonalGate::identity(3));
        let e = GraphSpec::uniform(4, &[(0, 2), (0, 3), (1, 3), (2, 3)], PI / 16.0).unwrap();
        let spec = walsh_spectrum(&graph_gate(&e));
        for j in 1..16usize {
            let expect = if [0b1010, 0b1001, 0b0101, 0b0011].contains(&j) { PI / 16.0 } else { 0.0 };
            assert!((spec.angle(j) - expect).abs() < 1e-12, "mask {j:04b}");
        }
        assert!(GraphSpec::new(2, &[(1, 1)]).is_err());
        assert!(GraphSpec::new(2, &[(0, 2)]).is_err());
        assert!(GraphSpec::new(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn resource_states() {
        assert_eq!(gate_state(&DiagonalGate::identity(2)).unwrap(), StateVector::plus(2).unwrap());
        let cz = gate_state(&DiagonalGate::cz()).unwrap();
        assert!((cz.entanglement_entropy(&[0]).unwrap() - 1.0).abs() < 1e-12);
        for n in 2..=5 {
            let ghz = ghz_state(n).unwrap();
            for q in 0..n {
                assert!((ghz.entanglement_entropy(&[q]).unwrap() - 1.0).abs() < 1e-9);
            }
        }
        assert!(ghz_state(1).is_err());
        let bell = choi_state(&gates::identity(1)).unwrap();
        let phi = StateVector::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        assert!((fidelity_up_to_phase(&bell, &phi).unwrap() - 1.0).abs() < 1e-12);
        let hc = choi_state(&gates::h()).unwrap();
        assert!((hc.entanglement_entropy(&[0]).unwrap() - 1.0).abs() < 1e-12);
        let bad = Matrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(choi_state(&bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn ghz_matches_cx_ladder_up_to_local_cliffords() {
        // H on qubit 0 then a CX ladder gives (|0000> + |1111>)/√2; Hadamards on
        // the leaves map it to the star graph state.
        let mut ladder = StateVector::zero(4).unwrap().apply_gate(&gates::h(), &[0]).unwrap();
        for q in 1..4 {
            ladder = ladder.apply_gate(&gates::cx(), &[0, q]).unwrap();
        }
        let mut star = ghz_state(4).unwrap();
        for q in 1..4 {
            star = star.apply_gate(&gates::h(), &[q]).unwrap();
        }
        assert!(fidelity_up_to_phase(&ladder, &star).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn choi_of_diagonal_has_n_ebits() {
        let g = DiagonalGate::rotation(2, 0b11, 0.4);
        let c = choi_state(&g.matrix()).unwrap();
        assert!((c.entanglement_entropy(&[0, 1]).unwrap() - 2.0).abs() < 1e-9);
    }

    fn arb_alpha(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 1 << n)
    }

    proptest! {
        #[test]
        fn walsh_round_trip(alpha in (1usize..=5).prop_flat_map(arb_alpha)) {
            let g = DiagonalGate::new(alpha.clone()).unwrap();
            let back = from_rotations(&walsh_spectrum(&g));
            for (a, b) in alpha.iter().zip(back.phases()) {
                prop_assert!(close_mod_2pi(*a, *b, 1e-9));
            }
            let oracle = spectrum_oracle(g.phases());
            for (a, b) in walsh_spectrum(&g).angles().iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn conjugation_flips_spectrum_signs(alpha in arb_alpha(3), k in 0usize..8) {
            let g = DiagonalGate::new(alpha).unwrap();
            let before = walsh_spectrum(&g);
            let after = walsh_spectrum(&conjugate_by_x(&g, k).unwrap());
            for j in 0..8 {
                prop_assert!((after.angle(j) - bits::sign(j, k) * before.angle(j)).abs() < 1e-9);
            }
            let twice = conjugate_by_x(&conjugate_by_x(&g, k).unwrap(), k).unwrap();
            prop_assert_eq!(twice, g);
        }

        #[test]
        fn clifford_corrections_restore_gate(
            n in 1usize..=4,
            ks in prop::collection::vec(-3i32..=4, 16),
        ) {
            let theta: Vec<f64> = ks[..1 << n].iter().map(|&k| k as f64 * FRAC_PI_4).collect();
            let g = from_rotations(&WalshSpectrum::new(theta).unwrap());
            prop_assert!(is_clifford(&g, CLIFFORD_TOL));
            let state = gate_state(&g).unwrap();
            for q in 0..n {
                let e = state.entanglement_entropy(&[q]).unwrap_or(0.0);
                prop_assert!((e - e.round()).abs() < 1e-6);
            }
            for k in 0..1usize << n {
                let c = clifford_correction(&g, k).unwrap();
                let xk = PauliString::x(n, k).matrix();
                let fixed = c.matrix() * &xk * g.matrix() * &xk;
                prop_assert!(gates::distance_up_to_phase(&fixed, &g.matrix()) < 1e-9);
            }
        }
    }
}
