//! Repeat-until-success protocols.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;

use super::deterministic::{choi_round, clifford_choi_round, clifford_round, gate_round, is_clifford_unitary};
use super::{Forced, InductionRecord, XorSpan, ANGLE_TOL};
use crate::bits;
use crate::diagonal::{self, distance_to_multiple, graph_gate, DiagonalGate, GraphSpec, CLIFFORD_TOL};
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};
use crate::statevec::StateVector;

pub const DEFAULT_MAX_ROUNDS: usize = 64;

fn forced_round(forced: Forced<'_>, round: usize) -> Option<&[u8]> {
    forced.get(round - 1).map(Vec::as_slice).filter(|f| !f.is_empty())
}

fn is_quarter_turn(angle: f64) -> bool {
    distance_to_multiple(angle, FRAC_PI_4) <= ANGLE_TOL
}

/// `exp(iθ Z^{⊗mask})` by repeated gate-state rounds. Round `j` consumes the
/// gate state of `R(2^{j-1} θ)` and succeeds when the outcome has even
/// parity; a round whose angle is a multiple of π/4 is corrected
/// deterministically.
pub fn iterate_rotation<R: Rng + ?Sized>(
    theta: f64,
    mask: usize,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
    max_rounds: usize,
) -> Result<(StateVector, InductionRecord)> {
    let n = data.n_qubits();
    if mask >= 1 << n {
        return Err(Error::BasisIndex { index: mask, n });
    }
    let qubits = bits::qubits_of(n, mask);
    if qubits.is_empty() {
        return Err(Error::MaskWeight(0));
    }
    let m = qubits.len();
    let mut record = InductionRecord::diagonal(n);
    let mut state = data.clone();
    let mut angle = theta;
    for round in 1..=max_rounds {
        let gate = DiagonalGate::rotation(m, (1 << m) - 1, angle);
        let f = forced_round(forced, round);
        if is_quarter_turn(angle) {
            let (post, mut r, applied) = clifford_round(round, &gate, &qubits, &state, f, rng)?;
            r.angle = Some(angle);
            record.apply_diagonal(&applied)?;
            record.rounds.push(r);
            record.succeeded = true;
            return Ok((post, record));
        }
        let (post, mut r, applied) = gate_round(round, &gate, &qubits, &state, f, rng)?;
        let k = bits::to_index(&r.outcome)?;
        r.angle = Some(angle);
        r.success = bits::parity(k) == 0;
        record.apply_diagonal(&applied)?;
        state = post;
        let done = r.success;
        record.rounds.push(r);
        if done {
            record.succeeded = true;
            break;
        }
        angle *= 2.0;
    }
    Ok((state, record))
}

/// Pairwise rotations `Π exp(iθ_e Z_a Z_b)` by repeated graph-gate rounds.
/// Each edge keeps its own angle; an edge is finished when the outcomes on
/// its endpoints agree, otherwise its angle doubles. Later rounds act only on
/// the vertices of the unfinished edges, and their forced outcomes are
/// indexed over those vertices in increasing order.
pub fn iterate_pairwise<R: Rng + ?Sized>(
    spec: &GraphSpec,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
    max_rounds: usize,
) -> Result<(StateVector, InductionRecord)> {
    let n = data.n_qubits();
    if spec.vertices() != n {
        return Err(Error::DimensionMismatch(n, spec.vertices()));
    }
    let mut remaining: Vec<(usize, usize, f64)> =
        spec.edges().iter().map(|e| (e.a, e.b, e.angle)).collect();
    let mut record = InductionRecord::diagonal(n);
    let mut state = data.clone();
    if remaining.is_empty() {
        record.succeeded = true;
        return Ok((state, record));
    }
    for round in 1..=max_rounds {
        let mut support: Vec<usize> = remaining.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        support.sort_unstable();
        support.dedup();
        let local = |q: usize| support.binary_search(&q).unwrap_or_else(|_| unreachable!());
        let sub = GraphSpec::with_angles(
            support.len(),
            &remaining
                .iter()
                .map(|&(a, b, t)| (local(a), local(b), t))
                .collect::<Vec<_>>(),
        )?;
        let gate = graph_gate(&sub);
        let f = forced_round(forced, round);
        if remaining.iter().all(|&(_, _, t)| is_quarter_turn(t)) {
            let (post, r, applied) = clifford_round(round, &gate, &support, &state, f, rng)?;
            record.apply_diagonal(&applied)?;
            record.rounds.push(r);
            record.succeeded = true;
            return Ok((post, record));
        }
        let (post, mut r, applied) = gate_round(round, &gate, &support, &state, f, rng)?;
        record.apply_diagonal(&applied)?;
        state = post;
        let outcome = r.outcome.clone();
        remaining = remaining
            .into_iter()
            .filter(|&(a, b, _)| outcome[local(a)] != outcome[local(b)])
            .map(|(a, b, t)| (a, b, 2.0 * t))
            .collect();
        r.success = remaining.is_empty();
        record.rounds.push(r);
        if remaining.is_empty() {
            record.succeeded = true;
            break;
        }
    }
    Ok((state, record))
}

/// Target of the Toffoli-class protocol, a π phase on `|0…0>`.
pub fn toffoli_target(n: usize) -> DiagonalGate {
    DiagonalGate::projector_phase(n, 0, PI)
}

/// `exp(iπ|0…0><0…0|)` by repeated gate-state rounds. Round `j` targets the
/// residual `F A†`, where `A` is the product of the gates applied so far;
/// it succeeds when its outcome lies in the span of the earlier outcomes.
/// Once the residual is Clifford the round is corrected deterministically.
pub fn iterate_toffoli<R: Rng + ?Sized>(
    n: usize,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
    max_rounds: usize,
) -> Result<(StateVector, InductionRecord)> {
    if n < 2 {
        return Err(Error::MaskWeight(n));
    }
    if data.n_qubits() != n {
        return Err(Error::DimensionMismatch(data.n_qubits(), n));
    }
    let f_gate = toffoli_target(n);
    let qubits: Vec<usize> = (0..n).collect();
    let mut applied_total = DiagonalGate::identity(n);
    let mut span = XorSpan::new();
    let mut record = InductionRecord::diagonal(n);
    let mut state = data.clone();
    for round in 1..=max_rounds {
        let target = f_gate.compose(&applied_total.adjoint())?;
        let f = forced_round(forced, round);
        if diagonal::is_clifford(&target, CLIFFORD_TOL) {
            let (post, r, applied) = clifford_round(round, &target, &qubits, &state, f, rng)?;
            record.apply_diagonal(&applied)?;
            record.rounds.push(r);
            record.succeeded = true;
            return Ok((post, record));
        }
        let (post, mut r, applied) = gate_round(round, &target, &qubits, &state, f, rng)?;
        let k = bits::to_index(&r.outcome)?;
        r.success = span.contains(k);
        span.insert(k);
        applied_total = applied.compose(&applied_total)?;
        record.apply_diagonal(&applied)?;
        state = post;
        let done = r.success;
        record.rounds.push(r);
        if done {
            record.succeeded = true;
            break;
        }
    }
    Ok((state, record))
}

/// Two-qubit intermodular gates needed to distribute one GHZ state per
/// subset of at least two qubits, `w - 1` for a subset of weight `w`:
/// `1 + 2^{n-1}(n-2)`.
pub fn toffoli_ghz_gate_count(n: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::MaskWeight(n));
    }
    let overflow = || Error::TooManyQubits(n, 62);
    let pow = 1u64.checked_shl(n as u32 - 1).filter(|_| n < 64).ok_or_else(overflow)?;
    (n as u64 - 2)
        .checked_mul(pow)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(overflow)
}

/// General unitary by repeated Choi-state rounds. Round `j` targets `U F†`,
/// where `F` is the product of the gates applied so far; a trivial byproduct
/// ends the protocol, and a Clifford target is corrected deterministically.
pub fn iterate_general<R: Rng + ?Sized>(
    u: &Matrix,
    data: &StateVector,
    forced: Forced,
    rng: &mut R,
    max_rounds: usize,
) -> Result<(StateVector, InductionRecord)> {
    let n = gates::arity(u).ok_or(Error::NotPowerOfTwo(u.nrows()))?;
    if !gates::is_unitary(u) {
        return Err(Error::NotUnitary(gates::unitarity_deviation(u)));
    }
    if data.n_qubits() != n {
        return Err(Error::DimensionMismatch(data.n_qubits(), n));
    }
    let mut record = InductionRecord::unitary(n);
    let mut applied_total = gates::identity(n);
    let mut state = data.clone();
    for round in 1..=max_rounds {
        let target = u * applied_total.adjoint();
        let f = forced_round(forced, round);
        if is_clifford_unitary(&target, 1e-7) {
            let (post, r) = clifford_choi_round(round, &target, &state, f, rng)?;
            applied_total = &target * &applied_total;
            record.accumulated_unitary = Some(applied_total);
            record.rounds.push(r);
            record.succeeded = true;
            return Ok((post, record));
        }
        let (post, r, byproduct) = choi_round(round, &target, &state, f, rng)?;
        applied_total = &target * byproduct.matrix() * &applied_total;
        record.accumulated_unitary = Some(applied_total.clone());
        state = post;
        let done = r.success;
        record.rounds.push(r);
        if done {
            record.succeeded = true;
            break;
        }
    }
    Ok((state, record))
}
