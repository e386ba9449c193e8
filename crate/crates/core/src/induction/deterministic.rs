//! Single-shot protocols: Clifford diagonal gates with Pauli corrections,
//! GHZ/Bell-assisted multiqubit rotations, and Clifford gates via Choi states.

use rand::Rng;

use super::routine::{routine_t_on, routine_t_tilde, strip_prefix};
use super::{
    check_data_targets, check_forced, embed_pauli, max_of, single_cut_entropies, Forced,
    InductionRecord, RoundKind, RoundRecord,
};
use crate::bits;
use crate::diagonal::{
    self, clifford_correction, conjugate_by_x, gate_state, ghz_state, DiagonalGate, CLIFFORD_TOL,
};
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};
use crate::pauli::PauliString;
use crate::statevec::StateVector;

/// One routine-T round on `targets`. Returns the post state, the record (with
/// `success` left false) and the gate actually applied to the full register.
pub(super) fn gate_round<R: Rng + ?Sized>(
    round: usize,
    gate: &DiagonalGate,
    targets: &[usize],
    data: &StateVector,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(StateVector, RoundRecord, DiagonalGate)> {
    let n = data.n_qubits();
    let resource = gate_state(gate)?;
    let cuts = single_cut_entropies(&resource)?;
    let out = routine_t_on(&resource, data, targets, forced, rng)?;
    let k = bits::to_index(&out.outcome)?;
    let applied = conjugate_by_x(gate, k)?.embed(n, targets)?;
    let record = RoundRecord {
        round,
        kind: RoundKind::GateState,
        qubits: targets.to_vec(),
        outcome: out.outcome,
        probability: out.probability,
        byproduct: PauliString::x(n, bits::scatter(k, targets, n)),
        correction: None,
        ebits: max_of(&cuts),
        ebits_per_cut: cuts,
        target: Some(gate.clone()),
        angle: None,
        deterministic: false,
        success: false,
    };
    Ok((out.post, record, applied))
}

/// Routine T followed by the Clifford correction; applies exactly `gate`.
pub(super) fn clifford_round<R: Rng + ?Sized>(
    round: usize,
    gate: &DiagonalGate,
    targets: &[usize],
    data: &StateVector,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(StateVector, RoundRecord, DiagonalGate)> {
    if !diagonal::is_clifford(gate, CLIFFORD_TOL) {
        return Err(Error::NotClifford);
    }
    let n = data.n_qubits();
    let (post, mut record, _) = gate_round(round, gate, targets, data, forced, rng)?;
    let k = bits::to_index(&record.outcome)?;
    let correction = embed_pauli(&clifford_correction(gate, k)?, targets, n);
    record.kind = RoundKind::CliffordGateState;
    record.correction = Some(correction);
    record.deterministic = true;
    record.success = true;
    Ok((correction.apply(&post)?, record, gate.embed(n, targets)?))
}

/// Deterministic induction of a Clifford diagonal gate on every data qubit.
pub fn induce_clifford_diagonal<R: Rng + ?Sized>(
    target: &DiagonalGate,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
) -> Result<(StateVector, InductionRecord)> {
    let targets: Vec<usize> = (0..data.n_qubits()).collect();
    induce_clifford_diagonal_on(target, &targets, data, forced, rng)
}

pub fn induce_clifford_diagonal_on<R: Rng + ?Sized>(
    target: &DiagonalGate,
    targets: &[usize],
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
) -> Result<(StateVector, InductionRecord)> {
    check_data_targets(data, targets)?;
    let mut record = InductionRecord::diagonal(data.n_qubits());
    let (post, round, applied) =
        clifford_round(1, target, targets, data, forced.first().map(Vec::as_slice), rng)?;
    record.apply_diagonal(&applied)?;
    record.rounds.push(round);
    record.succeeded = true;
    Ok((post, record))
}

/// `exp(iθ Z^{⊗mask})` from one GHZ state on the masked qubits.
///
/// Memory qubits `2…n` run routine T against data qubits `2…n`; `Z^{Σk}` on
/// memory qubit 1; then `CZ(M_1, D_1)`, `exp(iθX)` on `M_1` and a computational
/// measurement `l`; finally `(Z^{⊗mask})^l` on the data. Forced outcomes list
/// `k_2…k_n` then `l`.
pub fn induce_rotation_ghz<R: Rng + ?Sized>(
    theta: f64,
    mask: usize,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
) -> Result<(StateVector, InductionRecord)> {
    let big_n = data.n_qubits();
    if mask >= 1 << big_n {
        return Err(Error::BasisIndex { index: mask, n: big_n });
    }
    let qubits = bits::qubits_of(big_n, mask);
    let n = qubits.len();
    if n < 2 {
        return Err(Error::MaskWeight(n));
    }
    let forced_round = forced.first().map(Vec::as_slice);
    check_forced(forced_round, n)?;

    let resource = ghz_state(n)?;
    let cuts = single_cut_entropies(&resource)?;
    let mut s = resource.tensor(data)?;
    for (i, &d) in qubits.iter().enumerate().skip(1) {
        s = s.apply_gate(&gates::cx(), &[n + d, i])?;
    }
    let mut outcome = Vec::with_capacity(n);
    let mut probability = 1.0;
    for q in 1..n {
        let m = s.measure(q, forced_round.map(|f| f[q - 1]), rng)?;
        probability *= m.probability;
        outcome.push(m.outcome);
        s = m.post_state;
    }
    if outcome.iter().fold(0, |a, &b| a ^ b) == 1 {
        s = s.apply_gate(&gates::z(), &[0])?;
    }
    s = s.apply_gate(&gates::cz(), &[0, n + qubits[0]])?;
    s = s.apply_gate(&gates::x_rotation(theta), &[0])?;
    let m = s.measure(0, forced_round.map(|f| f[n - 1]), rng)?;
    probability *= m.probability;
    let l = m.outcome;
    let mut memory = vec![l];
    memory.extend(&outcome);
    outcome.push(l);
    let mut post = strip_prefix(&m.post_state, n, bits::to_index(&memory)?)?;
    let byproduct = PauliString::z(big_n, if l == 1 { mask } else { 0 });
    post = byproduct.apply(&post)?;

    let mut record = InductionRecord::diagonal(big_n);
    record.apply_diagonal(&DiagonalGate::rotation(big_n, mask, theta))?;
    record.rounds.push(RoundRecord {
        round: 1,
        kind: RoundKind::Ghz,
        qubits,
        outcome,
        probability,
        byproduct,
        correction: Some(byproduct),
        ebits: max_of(&cuts),
        ebits_per_cut: cuts,
        target: Some(DiagonalGate::rotation(n, (1 << n) - 1, theta)),
        angle: Some(theta),
        deterministic: true,
        success: true,
    });
    record.succeeded = true;
    Ok((post, record))
}

/// `exp(iθ ZZ)` on a two-qubit data register from one Bell-equivalent
/// `|CZ>` state. Forced outcomes are `(k, l)`.
pub fn induce_rotation_bell<R: Rng + ?Sized>(
    theta: f64,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
) -> Result<(StateVector, InductionRecord)> {
    if data.n_qubits() != 2 {
        return Err(Error::DimensionMismatch(data.n_qubits(), 2));
    }
    induce_rotation_ghz(theta, 0b11, data, forced, rng)
}

/// Numerical Clifford test: `U P U†` is a Pauli string for every single-qubit
/// `X_q` and `Z_q`.
pub fn is_clifford_unitary(u: &Matrix, tol: f64) -> bool {
    let Some(n) = gates::arity(u) else {
        return false;
    };
    if !gates::is_unitary(u) {
        return false;
    }
    let ud = u.adjoint();
    (0..n).all(|q| {
        let e = bits::qubit_mask(n, q);
        [PauliString::x(n, e), PauliString::z(n, e)]
            .iter()
            .all(|p| PauliString::from_matrix(&(u * p.matrix() * &ud), tol).is_some())
    })
}

/// Choi-state cut entropies: the `M|M'` cut, then each module `{M_q, M'_q}`.
pub(super) fn choi_entropies(choi: &StateVector) -> Result<(f64, Vec<f64>)> {
    let n = choi.n_qubits() / 2;
    let m: Vec<usize> = (0..n).collect();
    let total = choi.entanglement_entropy(&m)?;
    let per_module = if n == 1 {
        vec![0.0]
    } else {
        (0..n)
            .map(|q| choi.entanglement_entropy(&[q, n + q]))
            .collect::<Result<_>>()?
    };
    Ok((total, per_module))
}

/// One routine-T̃ round. Returns the post state, the record and `X^i Z^j`.
pub(super) fn choi_round<R: Rng + ?Sized>(
    round: usize,
    u: &Matrix,
    data: &StateVector,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(StateVector, RoundRecord, PauliString)> {
    let n = data.n_qubits();
    let choi = diagonal::choi_state(u)?;
    let (ebits, cuts) = choi_entropies(&choi)?;
    let out = routine_t_tilde(&choi, data, forced, rng)?;
    let byproduct = PauliString {
        n,
        phase_exp: 0,
        x_mask: bits::to_index(&out.i)?,
        z_mask: bits::to_index(&out.j)?,
    };
    let mut outcome = out.i.clone();
    outcome.extend(&out.j);
    let record = RoundRecord {
        round,
        kind: RoundKind::Choi,
        qubits: (0..n).collect(),
        outcome,
        probability: out.probability,
        byproduct,
        correction: None,
        ebits,
        ebits_per_cut: cuts,
        target: None,
        angle: None,
        deterministic: false,
        success: byproduct.is_trivial(),
    };
    Ok((out.post, record, byproduct))
}

/// Routine T̃ plus the correction `U Z^j X^i U†`.
pub(super) fn clifford_choi_round<R: Rng + ?Sized>(
    round: usize,
    u: &Matrix,
    data: &StateVector,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(StateVector, RoundRecord)> {
    if !is_clifford_unitary(u, 1e-9) {
        return Err(Error::NotClifford);
    }
    let (post, mut record, byproduct) = choi_round(round, u, data, forced, rng)?;
    let n = data.n_qubits();
    let c = u
        * PauliString::z(n, byproduct.z_mask).matrix()
        * PauliString::x(n, byproduct.x_mask).matrix()
        * u.adjoint();
    let correction = PauliString::from_matrix(&c, 1e-7).ok_or(Error::NotClifford)?;
    record.kind = RoundKind::CliffordChoi;
    record.correction = Some(correction);
    record.deterministic = true;
    record.success = true;
    Ok((correction.apply(&post)?, record))
}

/// Deterministic induction of a Clifford unitary from its Choi state.
pub fn induce_clifford_general<R: Rng + ?Sized>(
    u: &Matrix,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
) -> Result<(StateVector, InductionRecord)> {
    let n = gates::arity(u).ok_or(Error::NotPowerOfTwo(u.nrows()))?;
    if data.n_qubits() != n {
        return Err(Error::DimensionMismatch(data.n_qubits(), n));
    }
    let (post, round) = clifford_choi_round(1, u, data, forced.first().map(Vec::as_slice), rng)?;
    let mut record = InductionRecord::unitary(n);
    record.accumulated_unitary = Some(u.clone());
    record.rounds.push(round);
    record.succeeded = true;
    Ok((post, record))
}

/// Sanity check used by callers that receive a Choi state from elsewhere.
