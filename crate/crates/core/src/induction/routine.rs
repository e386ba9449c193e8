//! Routines T (gate states) and T̃ (Choi states).

use num_complex::Complex64;
use rand::Rng;

use super::{check_data_targets, check_forced};
use crate::bits;
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};
use crate::statevec::StateVector;

const RESOURCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RoutineOutcome {
    /// Memory outcomes `k`, one bit per target.
    pub outcome: Vec<u8>,
    pub probability: f64,
    /// Data register after the routine, `X^k Λ X^k |ψ>` on the targets.
    pub post: StateVector,
}

#[derive(Clone, Debug)]
pub struct ChoiOutcome {
    /// Outcomes on `M`.
    pub i: Vec<u8>,
    /// Outcomes on `M'`.
    pub j: Vec<u8>,
    pub probability: f64,
    /// `U X^i Z^j |ψ>`.
    pub post: StateVector,
}

/// Measures qubits `0..count` of `state` in order.
fn measure_prefix<R: Rng + ?Sized>(
    state: StateVector,
    count: usize,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(StateVector, Vec<u8>, f64)> {
    let mut s = state;
    let mut outcome = Vec::with_capacity(count);
    let mut probability = 1.0;
    for q in 0..count {
        let m = s.measure(q, forced.map(|f| f[q]), rng)?;
        probability *= m.probability;
        outcome.push(m.outcome);
        s = m.post_state;
    }
    Ok((s, outcome, probability))
}

/// Data factor of a register whose leading `count` qubits were measured.
pub(super) fn strip_prefix(state: &StateVector, count: usize, prefix: usize) -> Result<StateVector> {
    let rest = state.n_qubits() - count;
    let base = prefix << rest;
    StateVector::from_amplitudes(state.amplitudes()[base..base + (1 << rest)].to_vec())
}

fn check_gate_state(resource: &StateVector) -> Result<()> {
    let expect = 1.0 / (1u64 << resource.n_qubits()) as f64;
    let worst = resource
        .amplitudes()
        .iter()
        .map(|a| (a.norm_sqr() - expect).abs())
        .fold(0.0, f64::max);
    if worst > RESOURCE_TOL {
        return Err(Error::Resource(format!(
            "not a gate state: amplitude weights deviate by {worst:.3e}"
        )));
    }
    Ok(())
}

/// Routine T on all data qubits.
pub fn routine_t<R: Rng + ?Sized>(
    resource: &StateVector,
    data: &StateVector,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<RoutineOutcome> {
    let targets: Vec<usize> = (0..data.n_qubits()).collect();
    routine_t_on(resource, data, &targets, forced, rng)
}

/// Routine T: `CX_{D_i→M_i}` for every target, then a computational
/// measurement of the memory. Memory qubit `i` pairs with data qubit
/// `targets[i]`.
pub fn routine_t_on<R: Rng + ?Sized>(
    resource: &StateVector,
    data: &StateVector,
    targets: &[usize],
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<RoutineOutcome> {
    check_data_targets(data, targets)?;
    let n = resource.n_qubits();
    if targets.len() != n {
        return Err(Error::ArityMismatch {
            gate: n,
            targets: targets.len(),
        });
    }
    check_forced(forced, n)?;
    check_gate_state(resource)?;
    let mut joint = resource.tensor(data)?;
    for (i, &d) in targets.iter().enumerate() {
        joint = joint.apply_gate(&gates::cx(), &[n + d, i])?;
    }
    let (joint, outcome, probability) = measure_prefix(joint, n, forced, rng)?;
    let post = strip_prefix(&joint, n, bits::to_index(&outcome)?)?;
    Ok(RoutineOutcome {
        outcome,
        probability,
        post,
    })
}

/// Reads `U` back from a Choi state, `u[l][k] = √2^n <k, l|Φ_U>`.
pub(crate) fn choi_unitary(choi: &StateVector) -> Result<Matrix> {
    let total = choi.n_qubits();
    if total % 2 != 0 {
        return Err(Error::Resource(format!("Choi state needs an even register, got {total} qubits")));
    }
    let n = total / 2;
    let dim = 1usize << n;
    let scale = Complex64::new((dim as f64).sqrt(), 0.0);
    let u = Matrix::from_fn(dim, dim, |l, k| choi.amplitude((k << n) | l) * scale);
    let dev = gates::unitarity_deviation(&u);
    if dev > 1e-7 {
        return Err(Error::Resource(format!("not a Choi state of a unitary (deviation {dev:.3e})")));
    }
    Ok(u)
}

/// Routine T̃ with register order `M, M', D`: `SWAP_{M'D}`, `CX_{M'→M}`,
/// `H` on `M'`, then measure `M` (giving `i`) and `M'` (giving `j`).
/// Forced outcomes list `i` then `j`.
pub fn routine_t_tilde<R: Rng + ?Sized>(
    choi: &StateVector,
    data: &StateVector,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<ChoiOutcome> {
    choi_unitary(choi)?;
    let n = choi.n_qubits() / 2;
    if data.n_qubits() != n {
        return Err(Error::DimensionMismatch(data.n_qubits(), n));
    }
    check_forced(forced, 2 * n)?;
    let mut joint = choi.tensor(data)?;
    for q in 0..n {
        let (m, mp, d) = (q, n + q, 2 * n + q);
        joint = joint.apply_gate(&gates::swap(), &[mp, d])?;
        joint = joint.apply_gate(&gates::cx(), &[mp, m])?;
        joint = joint.apply_gate(&gates::h(), &[mp])?;
    }
    let (joint, outcome, probability) = measure_prefix(joint, 2 * n, forced, rng)?;
    let post = strip_prefix(&joint, 2 * n, bits::to_index(&outcome)?)?;
    Ok(ChoiOutcome {
        i: outcome[..n].to_vec(),
        j: outcome[n..].to_vec(),
        probability,
        post,
    })
}
