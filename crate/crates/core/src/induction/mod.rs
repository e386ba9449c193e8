//! Gate induction from shared resource states.
//!
//! Data registers are ordinary [`StateVector`]s; each data qubit is taken to
//! live in its own module, so a round's entanglement cost is the largest
//! single-module cut entropy of the consumed resource state.
//!
//! Probabilistic protocols accept forced outcomes as one bit vector per round,
//! in measurement order. A missing round (or an empty slice) is sampled.

mod deterministic;
mod iterative;
mod routine;
mod split;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::diagonal::DiagonalGate;
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};
use crate::pauli::PauliString;
use crate::statevec::StateVector;

pub use deterministic::{
    induce_clifford_diagonal, induce_clifford_diagonal_on, induce_clifford_general,
    induce_rotation_bell, induce_rotation_ghz, is_clifford_unitary,
};
pub use iterative::{
    iterate_general, iterate_pairwise, iterate_rotation, iterate_toffoli, toffoli_ghz_gate_count,
    toffoli_target, DEFAULT_MAX_ROUNDS,
};
pub use routine::{routine_t, routine_t_on, routine_t_tilde, ChoiOutcome, RoutineOutcome};
pub use split::{split_circuit, Circuit, CircuitGate, GateKind, Piece, Resource, Segment, Strategy};

/// Tolerance for recognizing quarter-turn angles in iterative protocols.
pub const ANGLE_TOL: f64 = 1e-9;

/// Forced outcomes, one vector per round.
pub type Forced<'a> = &'a [Vec<u8>];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundKind {
    /// Routine T on a gate state, no correction.
    GateState,
    /// Routine T followed by a Pauli correction.
    CliffordGateState,
    /// GHZ (or Bell) assisted rotation.
    Ghz,
    /// Routine T̃ on a Choi state, no correction.
    Choi,
    /// Routine T̃ followed by a Pauli correction.
    CliffordChoi,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    pub kind: RoundKind,
    /// Data qubits acted on, in resource order.
    pub qubits: Vec<usize>,
    pub outcome: Vec<u8>,
    /// Probability of `outcome` given the preceding rounds.
    pub probability: f64,
    /// Pauli byproduct on the full data register, before correction.
    pub byproduct: PauliString,
    pub correction: Option<PauliString>,
    pub ebits: f64,
    pub ebits_per_cut: Vec<f64>,
    /// Target diagonal gate over `qubits`, when the round has one.
    pub target: Option<DiagonalGate>,
    /// Rotation angle for rotation-type rounds.
    pub angle: Option<f64>,
    pub deterministic: bool,
    /// Heralded success of this round.
    pub success: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionRecord {
    pub n_qubits: usize,
    pub rounds: Vec<RoundRecord>,
    pub succeeded: bool,
    /// Product of the gates applied to the data register, for diagonal protocols.
    pub accumulated: Option<DiagonalGate>,
    #[serde(skip)]
    pub accumulated_unitary: Option<Matrix>,
}

impl InductionRecord {
    fn diagonal(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            rounds: Vec::new(),
            succeeded: false,
            accumulated: Some(DiagonalGate::identity(n_qubits)),
            accumulated_unitary: None,
        }
    }

    fn unitary(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            rounds: Vec::new(),
            succeeded: false,
            accumulated: None,
            accumulated_unitary: Some(gates::identity(n_qubits)),
        }
    }

    fn apply_diagonal(&mut self, g: &DiagonalGate) -> Result<()> {
        if let Some(acc) = &self.accumulated {
            self.accumulated = Some(g.compose(acc)?);
        }
        Ok(())
    }

    pub fn total_ebits(&self) -> f64 {
        self.rounds.iter().map(|r| r.ebits).sum()
    }

    pub fn probabilistic_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| !r.deterministic).count()
    }

    /// Outcomes of every round, suitable for replay as forced outcomes.
    pub fn transcript(&self) -> Vec<Vec<u8>> {
        self.rounds.iter().map(|r| r.outcome.clone()).collect()
    }

    /// Probability of the whole outcome transcript.
    pub fn probability(&self) -> f64 {
        self.rounds.iter().map(|r| r.probability).product()
    }

    /// Matrix of the accumulated gate on the data register.
    pub fn accumulated_matrix(&self) -> Option<Matrix> {
        self.accumulated_unitary
            .clone()
            .or_else(|| self.accumulated.as_ref().map(DiagonalGate::matrix))
    }
}

/// XOR-closed span of outcome vectors, starting from `{0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorSpan {
    generators: Vec<usize>,
    span: BTreeSet<usize>,
}

impl Default for XorSpan {
    fn default() -> Self {
        Self::new()
    }
}

impl XorSpan {
    pub fn new() -> Self {
        Self {
            generators: Vec::new(),
            span: BTreeSet::from([0]),
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.span.contains(&k)
    }

    /// Adds a generator; returns whether the span grew.
    pub fn insert(&mut self, k: usize) -> bool {
        if self.contains(k) {
            self.generators.push(k);
            return false;
        }
        let shifted: Vec<usize> = self.span.iter().map(|s| s ^ k).collect();
        self.span.extend(shifted);
        self.generators.push(k);
        true
    }

    pub fn rank(&self) -> usize {
        self.span.len().trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.span.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.span.iter().copied()
    }
}

/// Lifts a Pauli string on `targets` into an `n`-qubit register.
pub fn embed_pauli(p: &PauliString, targets: &[usize], n: usize) -> PauliString {
    PauliString {
        n,
        phase_exp: p.phase_exp,
        x_mask: bits::scatter(p.x_mask, targets, n),
        z_mask: bits::scatter(p.z_mask, targets, n),
    }
}

/// Entropy of each single-qubit cut of a resource state (one qubit per module).
pub(crate) fn single_cut_entropies(state: &StateVector) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    if n == 1 {
        return Ok(vec![0.0]);
    }
    (0..n).map(|q| state.entanglement_entropy(&[q])).collect()
}

pub(crate) fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

pub(crate) fn check_forced(forced: Option<&[u8]>, expected: usize) -> Result<()> {
    match forced {
        Some(f) if f.len() != expected => Err(Error::ForcedLength {
            expected,
            got: f.len(),
        }),
        _ => Ok(()),
    }
}

pub(crate) fn check_data_targets(data: &StateVector, targets: &[usize]) -> Result<()> {
    let n = data.n_qubits();
    if targets.is_empty() {
        return Err(Error::MaskWeight(0));
    }
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
