//! Splitting a circuit into local blocks and intermodular pieces, each piece
//! tagged with the induction strategy and the resource it consumes.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use super::deterministic::is_clifford_unitary;
use super::ANGLE_TOL;
use crate::bits;
use crate::cost::{expected_cost, strategy_advice, StrategyTag};
use crate::diagonal::{self, gate_state, walsh_spectrum, wrap_angle, DiagonalGate, CLIFFORD_TOL};
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};

use super::iterative::toffoli_ghz_gate_count;

#[derive(Clone, Debug)]
pub enum GateKind {
    Diagonal(DiagonalGate),
    /// A dense unitary; `clifford` declares it Clifford without a numeric check.
    Unitary { matrix: Matrix, clifford: bool },
}

#[derive(Clone, Debug)]
pub struct CircuitGate {
    pub label: String,
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl CircuitGate {
    pub fn diagonal(label: &str, gate: DiagonalGate, qubits: &[usize]) -> Self {
        Self {
            label: label.to_string(),
            kind: GateKind::Diagonal(gate),
            qubits: qubits.to_vec(),
        }
    }

    pub fn unitary(label: &str, matrix: Matrix, qubits: &[usize]) -> Self {
        Self {
            label: label.to_string(),
            kind: GateKind::Unitary {
                matrix,
                clifford: false,
            },
            qubits: qubits.to_vec(),
        }
    }

    fn arity(&self) -> Option<usize> {
        match &self.kind {
            GateKind::Diagonal(g) => Some(g.arity()),
            GateKind::Unitary { matrix, .. } => gates::arity(matrix),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Circuit {
    pub n_qubits: usize,
    /// Module of each qubit.
    pub module_of: Vec<usize>,
    pub gates: Vec<CircuitGate>,
}

impl Circuit {
    pub fn new(module_of: Vec<usize>) -> Self {
        Self {
            n_qubits: module_of.len(),
            module_of,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: CircuitGate) -> Result<&mut Self> {
        let arity = gate
            .arity()
            .ok_or_else(|| Error::NoStrategy(format!("{}: matrix is not a qubit gate", gate.label)))?;
        if arity != gate.qubits.len() {
            return Err(Error::ArityMismatch {
                gate: arity,
                targets: gate.qubits.len(),
            });
        }
        for (i, &q) in gate.qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n: self.n_qubits });
            }
            if gate.qubits[..i].contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    fn modules(&self, qubits: &[usize]) -> Vec<usize> {
        qubits
            .iter()
            .map(|&q| self.module_of[q])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Clifford diagonal gate from its gate state plus Pauli correction.
    GateState,
    /// Repeat-until-success rotation.
    Iterative,
    /// Two-qubit rotation from one Bell-equivalent state.
    BellDeterministic,
    /// Multiqubit rotation from one GHZ state.
    Ghz,
    /// Toffoli-class gate by repeated gate-state rounds.
    Toffoli,
    /// Diagonal gate split into rotations, one GHZ state per nonlocal rotation.
    RotationProduct,
    /// Clifford unitary from its Choi state plus Pauli correction.
    Choi,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Resource {
    GateState { ebits: f64 },
    BellPair { count: usize },
    IterativeGateStates { expected_ebits: f64 },
    Ghz { count: usize },
    ToffoliPlan {
        qubits: usize,
        /// Rounds in the worst case, the last one deterministic.
        max_rounds: usize,
        /// Success probability of each probabilistic round.
        success_probabilities: Vec<f64>,
        /// Two-qubit gates of the alternative route through GHZ states.
        ghz_gate_count: u64,
    },
    Choi { ebits: f64 },
}

impl Resource {
    /// Ebits consumed, expected value for probabilistic routes. `None` for
    /// plans whose cost is not a single number.
    pub fn ebits(&self) -> Option<f64> {
        match self {
            Resource::GateState { ebits } | Resource::Choi { ebits } => Some(*ebits),
            Resource::BellPair { count } | Resource::Ghz { count } => Some(*count as f64),
            Resource::IterativeGateStates { expected_ebits } => Some(*expected_ebits),
            Resource::ToffoliPlan { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Piece {
    pub gate_index: usize,
    pub label: String,
    pub qubits: Vec<usize>,
    pub modules: Vec<usize>,
    pub strategy: Strategy,
    pub resource: Resource,
    /// Qubit conjugated by Hadamards to make the gate diagonal, if any.
    pub hadamard_on: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "segment", rename_all = "kebab-case")]
pub enum Segment {
    /// Indices of consecutive gates that each stay inside one module.
    Local { gates: Vec<usize> },
    Intermodular(Piece),
}

/// Greedy left-to-right split into alternating local blocks and
/// intermodular pieces.
pub fn split_circuit(circuit: &Circuit) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    let mut block = Vec::new();
    for (index, gate) in circuit.gates.iter().enumerate() {
        let modules = circuit.modules(&gate.qubits);
        if modules.len() <= 1 {
            block.push(index);
            continue;
        }
        if !block.is_empty() {
            out.push(Segment::Local {
                gates: std::mem::take(&mut block),
            });
        }
        out.push(Segment::Intermodular(classify(circuit, index, gate, modules)?));
    }
    if !block.is_empty() {
        out.push(Segment::Local { gates: block });
    }
    Ok(out)
}

fn classify(circuit: &Circuit, index: usize, gate: &CircuitGate, modules: Vec<usize>) -> Result<Piece> {
    let local_modules: Vec<usize> = gate.qubits.iter().map(|&q| circuit.module_of[q]).collect();
    let piece = |strategy, resource, hadamard_on| Piece {
        gate_index: index,
        label: gate.label.clone(),
        qubits: gate.qubits.clone(),
        modules: modules.clone(),
        strategy,
        resource,
        hadamard_on,
    };
    match &gate.kind {
        GateKind::Diagonal(g) => {
            let (s, r) = classify_diagonal(g, &local_modules)?;
            Ok(piece(s, r, None))
        }
        GateKind::Unitary { matrix, clifford } => {
            let n = gate.qubits.len();
            if *clifford || is_clifford_unitary(matrix, 1e-9) {
                return Ok(piece(Strategy::Choi, Resource::Choi { ebits: n as f64 }, None));
            }
            if let Some(g) = as_diagonal(matrix) {
                let (s, r) = classify_diagonal(&g, &local_modules)?;
                return Ok(piece(s, r, None));
            }
            for q in 0..n {
                let h = gates::embed(&gates::h(), &[q], n);
                if let Some(g) = as_diagonal(&(&h * matrix * &h)) {
                    let (s, r) = classify_diagonal(&g, &local_modules)?;
                    return Ok(piece(s, r, Some(gate.qubits[q])));
                }
            }
            Err(Error::NoStrategy(format!(
                "{}: intermodular gate is neither diagonal nor Clifford",
                gate.label
            )))
        }
    }
}

fn as_diagonal(m: &Matrix) -> Option<DiagonalGate> {
    let dim = m.nrows();
    for r in 0..dim {
        for c in 0..dim {
            if r != c && m[(r, c)].norm() > 1e-9 {
                return None;
            }
        }
    }
    DiagonalGate::new((0..dim).map(|i| m[(i, i)].arg()).collect()).ok()
}

/// Largest entropy across a cut separating one module's qubits of a gate
/// state from the rest.
fn module_cut_ebits(g: &DiagonalGate, modules: &[usize]) -> Result<f64> {
    let state = gate_state(g)?;
    let distinct: BTreeSet<usize> = modules.iter().copied().collect();
    let mut best: f64 = 0.0;
    for m in distinct {
        let part: Vec<usize> = (0..modules.len()).filter(|&q| modules[q] == m).collect();
        if part.len() < modules.len() {
            best = best.max(state.entanglement_entropy(&part)?);
        }
    }
    Ok(best)
}

/// A single π phase on one basis state, up to a global phase.
fn single_pi_phase(g: &DiagonalGate) -> bool {
    let ref_phase = g.phases()[0];
    let rel: Vec<f64> = g.phases().iter().map(|a| wrap_angle(a - ref_phase)).collect();
    let pis = rel.iter().filter(|a| (a.abs() - PI).abs() < ANGLE_TOL).count();
    let zeros = rel.iter().filter(|a| a.abs() < ANGLE_TOL).count();
    // Either one entry is π away from all others, or all but one are π away
    // from the first.
    (pis == 1 && zeros == rel.len() - 1) || (zeros == 1 && pis == rel.len() - 1)
}

fn spans_modules(mask: usize, n: usize, modules: &[usize]) -> bool {
    let set: BTreeSet<usize> = bits::qubits_of(n, mask).into_iter().map(|q| modules[q]).collect();
    set.len() > 1
}

fn classify_diagonal(g: &DiagonalGate, modules: &[usize]) -> Result<(Strategy, Resource)> {
    let n = g.arity();
    if diagonal::is_clifford(g, CLIFFORD_TOL) {
        let ebits = module_cut_ebits(g, modules)?;
        return Ok((Strategy::GateState, Resource::GateState { ebits }));
    }
    let spectrum = walsh_spectrum(g);
    let nonlocal: Vec<usize> = spectrum
        .support(ANGLE_TOL)
        .into_iter()
        .filter(|&m| m != 0 && spans_modules(m, n, modules))
        .collect();
    if nonlocal.len() == 1 {
        let mask = nonlocal[0];
        let theta = spectrum.angle(mask);
        if mask.count_ones() == 2 {
            return Ok(match strategy_advice(theta) {
                StrategyTag::Iterative => (
                    Strategy::Iterative,
                    Resource::IterativeGateStates {
                        expected_ebits: expected_cost(crate::cost::fold_angle(theta)),
                    },
                ),
                StrategyTag::BellDeterministic => {
                    (Strategy::BellDeterministic, Resource::BellPair { count: 1 })
                }
            });
        }
        return Ok((Strategy::Ghz, Resource::Ghz { count: 1 }));
    }
    if single_pi_phase(g) {
        let success_probabilities = (1..n.saturating_sub(1))
            .map(|j| (1u64 << (j - 1)) as f64 / (1u64 << n) as f64)
            .collect();
        return Ok((
            Strategy::Toffoli,
            Resource::ToffoliPlan {
                qubits: n,
                max_rounds: n - 1,
                success_probabilities,
                ghz_gate_count: toffoli_ghz_gate_count(n)?,
            },
        ));
    }
    Ok((Strategy::RotationProduct, Resource::Ghz { count: nonlocal.len() }))
}
