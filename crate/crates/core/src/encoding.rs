//! Entangling-unit lifecycle: GHZ encoding of a logical qubit, unitary and
//! measurement-based decoding, transfer into memory, and entanglement
//! swapping between memory qubits.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::gates;
use crate::statevec::{fidelity_up_to_phase, StateVector};

/// Allowed leakage out of the code space, and out of `|0>` for memories.
pub const CODE_SPACE_TOL: f64 = 1e-9;

/// Placement of entangling (`E`) and memory (`M`) qubits of every module inside
/// one global register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegisterMap {
    n_qubits: usize,
    entangling: Vec<Vec<usize>>,
    memory: Vec<Vec<usize>>,
}

impl RegisterMap {
    pub fn new(n_qubits: usize, entangling: Vec<Vec<usize>>, memory: Vec<Vec<usize>>) -> Result<Self> {
        if entangling.len() != memory.len() {
            return Err(Error::InvalidRegisterMap(format!(
                "{} entangling units but {} memory units",
                entangling.len(),
                memory.len()
            )));
        }
        let mut seen = vec![false; n_qubits];
        for q in entangling.iter().chain(&memory).flatten() {
            if *q >= n_qubits {
                return Err(Error::InvalidRegisterMap(format!("qubit {q} outside a {n_qubits}-qubit register")));
            }
            if std::mem::replace(&mut seen[*q], true) {
                return Err(Error::InvalidRegisterMap(format!("qubit {q} assigned twice")));
            }
        }
        if entangling.iter().any(Vec::is_empty) {
            return Err(Error::InvalidRegisterMap("empty entangling unit".into()));
        }
        Ok(Self {
            n_qubits,
            entangling,
            memory,
        })
    }

    /// All entangling units first (module by module), then `memory_per_module`
    /// memory qubits per module.
    pub fn standard(unit_sizes: &[usize], memory_per_module: usize) -> Result<Self> {
        let e_total: usize = unit_sizes.iter().sum();
        let mut next = 0;
        let entangling = unit_sizes
            .iter()
            .map(|&m| {
                let unit = (next..next + m).collect();
                next += m;
                unit
            })
            .collect();
        let memory = (0..unit_sizes.len())
            .map(|i| {
                let start = e_total + i * memory_per_module;
                (start..start + memory_per_module).collect()
            })
            .collect();
        Self::new(e_total + unit_sizes.len() * memory_per_module, entangling, memory)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn modules(&self) -> usize {
        self.entangling.len()
    }

    pub fn entangling(&self, module: usize) -> Result<&[usize]> {
        self.entangling
            .get(module)
            .map(Vec::as_slice)
            .ok_or(Error::ModuleOutOfRange(module))
    }

    pub fn memory(&self, module: usize) -> Result<&[usize]> {
        self.memory
            .get(module)
            .map(Vec::as_slice)
            .ok_or(Error::ModuleOutOfRange(module))
    }
}

fn check_unit(state: &StateVector, unit: &[usize]) -> Result<()> {
    if unit.is_empty() {
        return Err(Error::InvalidRegisterMap("empty entangling unit".into()));
    }
    let n = state.n_qubits();
    for (i, &q) in unit.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        if unit[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

/// Weight of the state inside `span{|0…0>, |1…1>}` on `unit`.
pub fn code_space_weight(state: &StateVector, unit: &[usize]) -> Result<f64> {
    check_unit(state, unit)?;
    let n = state.n_qubits();
    let mask = bits::mask_of(n, unit);
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let u = i & mask;
            u == 0 || u == mask
        })
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

fn check_code_space(state: &StateVector, unit: &[usize]) -> Result<()> {
    let leak = 1.0 - code_space_weight(state, unit)?;
    if leak > CODE_SPACE_TOL {
        return Err(Error::OutsideCodeSpace(leak));
    }
    Ok(())
}

fn cx_ladder(state: &StateVector, unit: &[usize]) -> Result<StateVector> {
    unit[1..]
        .iter()
        .try_fold(state.clone(), |s, &q| s.apply_gate(&gates::cx(), &[unit[0], q]))
}

/// `Π_{μ≥2} CX_{E(1)→E(μ)}`: maps `a|0>+b|1>` on the first unit qubit (rest in
/// `|0>`) to `a|0…0>+b|1…1>`.
pub fn encode_logical(state: &StateVector, unit: &[usize]) -> Result<StateVector> {
    check_unit(state, unit)?;
    cx_ladder(state, unit)
}

/// Inverse of [`encode_logical`] on the code space.
pub fn decode_logical(state: &StateVector, unit: &[usize]) -> Result<StateVector> {
    check_code_space(state, unit)?;
    cx_ladder(state, unit)
}

/// Measurement-based decoding: X-basis measurements on unit qubits 2…m with a
/// `Z^{Σl}` feed-forward on the first qubit. Measured qubits are reset to
/// `|0>`, so the result equals [`decode_logical`] on every branch.
pub fn decode_logical_dynamic<R: Rng + ?Sized>(
    state: &StateVector,
    unit: &[usize],
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<(StateVector, Vec<u8>)> {
    check_code_space(state, unit)?;
    let rest = &unit[1..];
    if let Some(f) = forced {
        if f.len() != rest.len() {
            return Err(Error::ForcedLength {
                expected: rest.len(),
                got: f.len(),
            });
        }
    }
    let mut s = state.clone();
    let mut outcomes = Vec::with_capacity(rest.len());
    for (idx, &q) in rest.iter().enumerate() {
        s = s.apply_gate(&gates::h(), &[q])?;
        let m = s.measure(q, forced.map(|f| f[idx]), rng)?;
        s = m.post_state.reset_known(q, m.outcome)?;
        outcomes.push(m.outcome);
    }
    if outcomes.iter().fold(0, |acc, &l| acc ^ l) == 1 {
        s = s.apply_gate(&gates::z(), &[unit[0]])?;
    }
    Ok((s, outcomes))
}

/// Moves the decoded state of module `module` from `E_{i(1)}` to `M_{i(1)}`
/// with `CX_{E→M}` then `CX_{M→E}`.
pub fn transfer_to_memory(state: &StateVector, map: &RegisterMap, module: usize) -> Result<StateVector> {
    if state.n_qubits() != map.n_qubits() {
        return Err(Error::DimensionMismatch(state.n_qubits(), map.n_qubits()));
    }
    let e = map.entangling(module)?[0];
    let m = *map
        .memory(module)?
        .first()
        .ok_or_else(|| Error::InvalidRegisterMap(format!("module {module} has no memory qubit")))?;
    if state.branch_probability(m, 1)? > CODE_SPACE_TOL {
        return Err(Error::MemoryNotReset(m));
    }
    state
        .apply_gate(&gates::cx(), &[e, m])?
        .apply_gate(&gates::cx(), &[m, e])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwapMode {
    /// Leaves a GHZ state on (outer of first, first center, outer of second).
    Ghz,
    /// Leaves a Bell pair between the two outer qubits.
    Bell,
}

pub fn bell_pair() -> StateVector {
    let z = Complex64::new(0.0, 0.0);
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_amplitudes(vec![r, z, z, r]).expect("normalized")
}

/// The qubit sharing a `Φ+` pair with `c`, skipping `exclude`.
fn bell_partner(state: &StateVector, c: usize, exclude: usize) -> Option<usize> {
    let phi = bell_pair();
    (0..state.n_qubits())
        .filter(|&q| q != c && q != exclude)
        .find(|&q| {
            state
                .extract(&[c, q])
                .and_then(|pair| fidelity_up_to_phase(&pair, &phi))
                .is_ok_and(|f| f >= 1.0 - CODE_SPACE_TOL)
        })
}

#[derive(Clone, Debug)]
pub struct SwapResult {
    pub state: StateVector,
    /// Measurement outcomes in order (second center, then first center in
    /// Bell mode).
    pub outcomes: Vec<u8>,
    /// `(o1, c1, o2)` in GHZ mode, `(o1, o2)` in Bell mode.
    pub holders: Vec<usize>,
}

/// Entanglement swapping between `Φ+(o1, c1)` and `Φ+(c2, o2)`.
///
/// GHZ mode: `CZ(c1, c2)`, X measurement of `c2` (outcome `l`), `Z^l` and `H`
/// on `o2`, giving `(|000>+|111>)/√2` on `(o1, c1, o2)`. Bell mode additionally
/// X-measures `c1` (outcome `l'`) and applies `Z^{l'}` on `o1`, giving `Φ+` on
/// `(o1, o2)`. Measured qubits are reset to `|0>`.
pub fn merge_swap<R: Rng + ?Sized>(
    state: &StateVector,
    center: (usize, usize),
    mode: SwapMode,
    forced: Option<&[u8]>,
    rng: &mut R,
) -> Result<SwapResult> {
    let (c1, c2) = center;
    check_unit(state, &[c1, c2])?;
    let expected = match mode {
        SwapMode::Ghz => 1,
        SwapMode::Bell => 2,
    };
    if let Some(f) = forced {
        if f.len() != expected {
            return Err(Error::ForcedLength {
                expected,
                got: f.len(),
            });
        }
    }
    let o1 = bell_partner(state, c1, c2).ok_or(Error::NotProduct(vec![c1]))?;
    let o2 = bell_partner(state, c2, c1)
        .filter(|&q| q != o1)
        .ok_or(Error::NotProduct(vec![c2]))?;

    let mut s = state.apply_gate(&gates::cz(), &[c1, c2])?;
    s = s.apply_gate(&gates::h(), &[c2])?;
    let m = s.measure(c2, forced.map(|f| f[0]), rng)?;
    let l = m.outcome;
    s = m.post_state.reset_known(c2, l)?;
    if l == 1 {
        s = s.apply_gate(&gates::z(), &[o2])?;
    }
    s = s.apply_gate(&gates::h(), &[o2])?;
    let mut outcomes = vec![l];
    if mode == SwapMode::Ghz {
        return Ok(SwapResult {
            state: s,
            outcomes,
            holders: vec![o1, c1, o2],
        });
    }
    s = s.apply_gate(&gates::h(), &[c1])?;
    let m = s.measure(c1, forced.map(|f| f[1]), rng)?;
    s = m.post_state.reset_known(c1, m.outcome)?;
    if m.outcome == 1 {
        s = s.apply_gate(&gates::z(), &[o1])?;
    }
    outcomes.push(m.outcome);
    Ok(SwapResult {
        state: s,
        outcomes,
        holders: vec![o1, o2],
    })
}

/// `(|0…0> + |1…1>)/√2`.
pub fn cat_state(n: usize) -> Result<StateVector> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_amplitudes(amps)
}
