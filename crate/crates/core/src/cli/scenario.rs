//! Scenario documents: a module layout, a coupling model, a seed and an
//! ordered task list.

use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingModel, ModuleLayout};
use crate::diagonal::{graph_gate, DiagonalGate, GraphSpec};
use crate::error::{Error, Result};
use crate::gates::{self, Matrix};
use crate::induction::toffoli_target;

pub const DEFAULT_TRIALS: usize = 1000;

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub layout: ModuleLayout,
    pub coupling: CouplingModel,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    /// Encode, couple, decode and store the gate state of `exp(i f̄ t ZZ)`.
    PrepareResource {
        #[serde(default)]
        name: Option<String>,
        modules: [usize; 2],
        time: f64,
        #[serde(default)]
        dynamic_decode: bool,
        /// Decode outcomes per module, for dynamic decoding.
        #[serde(default)]
        forced: Vec<Vec<u8>>,
    },
    InduceGate {
        #[serde(default)]
        name: Option<String>,
        gate: GateSpec,
        protocol: Protocol,
        /// Module holding each data qubit; defaults to `0, 1, …`.
        #[serde(default)]
        modules: Option<Vec<usize>>,
        #[serde(default)]
        forced: Vec<Vec<u8>>,
        #[serde(default)]
        max_rounds: Option<usize>,
    },
    GoldenTrace {
        #[serde(default)]
        name: Option<String>,
        trace: GoldenName,
    },
    CostAnalysis {
        #[serde(default)]
        name: Option<String>,
        theta: f64,
        #[serde(default)]
        trials: Option<usize>,
    },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::PrepareResource { .. } => "prepare-resource",
            Task::InduceGate { .. } => "induce-gate",
            Task::GoldenTrace { .. } => "golden-trace",
            Task::CostAnalysis { .. } => "cost-analysis",
        }
    }

    pub fn name(&self, index: usize) -> String {
        let name = match self {
            Task::PrepareResource { name, .. }
            | Task::InduceGate { name, .. }
            | Task::GoldenTrace { name, .. }
            | Task::CostAnalysis { name, .. } => name,
        };
        name.clone().unwrap_or_else(|| format!("{}-{index}", self.kind()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoldenName {
    AppendixE,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    CliffordDiagonal,
    Bell,
    Ghz,
    IterativeRotation,
    IterativePairwise,
    Toffoli,
    CliffordGeneral,
    IterativeGeneral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedGate {
    H,
    S,
    T,
    X,
    Cx,
    Cz,
    Swap,
    Ccx,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GateSpec {
    Cz,
    Zz { theta: f64 },
    /// `exp(iθ Z^{⊗mask})` on `qubits` data qubits; `mask` lists the qubits.
    Rotation { qubits: usize, mask: Vec<usize>, theta: f64 },
    Graph { qubits: usize, edges: Vec<[usize; 2]>, angle: f64 },
    /// `exp(iπ|0…0><0…0|)`.
    Toffoli { qubits: usize },
    XRotation { theta: f64 },
    Named { name: NamedGate },
}

impl GateSpec {
    pub fn arity(&self) -> usize {
        match self {
            GateSpec::Cz | GateSpec::Zz { .. } => 2,
            GateSpec::Rotation { qubits, .. }
            | GateSpec::Graph { qubits, .. }
            | GateSpec::Toffoli { qubits } => *qubits,
            GateSpec::XRotation { .. } => 1,
            GateSpec::Named { name } => match name {
                NamedGate::H | NamedGate::S | NamedGate::T | NamedGate::X => 1,
                NamedGate::Cx | NamedGate::Cz | NamedGate::Swap => 2,
                NamedGate::Ccx => 3,
            },
        }
    }

    pub fn rotation_mask(&self) -> Result<Option<(usize, f64)>> {
        Ok(match self {
            GateSpec::Zz { theta } => Some((0b11, *theta)),
            GateSpec::Rotation { qubits, mask, theta } => {
                for &q in mask {
                    if q >= *qubits {
                        return Err(Error::QubitOutOfRange { qubit: q, n: *qubits });
                    }
                }
                Some((crate::bits::mask_of(*qubits, mask), *theta))
            }
            _ => None,
        })
    }

    pub fn graph(&self) -> Result<Option<GraphSpec>> {
        Ok(match self {
            GateSpec::Graph { qubits, edges, angle } => {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Some(GraphSpec::uniform(*qubits, &pairs, *angle)?)
            }
            GateSpec::Zz { theta } => Some(GraphSpec::uniform(2, &[(0, 1)], *theta)?),
            GateSpec::Cz => Some(GraphSpec::new(2, &[(0, 1)])?),
            _ => None,
        })
    }

    pub fn diagonal(&self) -> Result<Option<DiagonalGate>> {
        Ok(match self {
            GateSpec::Cz | GateSpec::Named { name: NamedGate::Cz } => Some(DiagonalGate::cz()),
            GateSpec::Zz { theta } => Some(DiagonalGate::zz(*theta)),
            GateSpec::Rotation { qubits, .. } => {
                let (mask, theta) = self.rotation_mask()?.expect("rotation");
                Some(DiagonalGate::rotation(*qubits, mask, theta))
            }
            GateSpec::Graph { .. } => Some(graph_gate(&self.graph()?.expect("graph"))),
            GateSpec::Toffoli { qubits } => Some(toffoli_target(*qubits)),
            GateSpec::Named { name: NamedGate::S } => Some(DiagonalGate::projector_phase(1, 1, std::f64::consts::FRAC_PI_2)),
            GateSpec::Named { name: NamedGate::T } => Some(DiagonalGate::projector_phase(1, 1, std::f64::consts::FRAC_PI_4)),
            _ => None,
        })
    }

    pub fn matrix(&self) -> Result<Matrix> {
        if let Some(g) = self.diagonal()? {
            return Ok(g.matrix());
        }
        Ok(match self {
            GateSpec::XRotation { theta } => gates::x_rotation(*theta),
            GateSpec::Named { name } => match name {
                NamedGate::H => gates::h(),
                NamedGate::X => gates::x(),
                NamedGate::Cx => gates::cx(),
                NamedGate::Swap => gates::swap(),
                NamedGate::Ccx => gates::ccx(),
                NamedGate::S => gates::s(),
                NamedGate::T => gates::t(),
                NamedGate::Cz => gates::cz(),
            },
            _ => unreachable!("diagonal specs handled above"),
        })
    }
}

fn describe(e: &serde_path_to_error::Error<serde_json::Error>) -> String {
    let inner = e.inner();
    let path = e.path().to_string();
    if path.is_empty() || path == "." {
        format!("line {} column {}: {inner}", inner.line(), inner.column())
    } else {
        format!("at `{path}` (line {} column {}): {inner}", inner.line(), inner.column())
    }
}

/// Parses and validates a scenario document. Unknown keys are rejected and
/// errors name the offending field path.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario =
        serde_path_to_error::deserialize(de).map_err(|e| Error::Scenario(describe(&e)))?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |i: usize, msg: String| Err(Error::Scenario(format!("tasks[{i}]: {msg}")));
        self.coupling
            .validate()
            .map_err(|e| Error::Scenario(format!("coupling: {e}")))?;
        if self.trials == 0 {
            return Err(Error::Scenario("trials must be at least 1".into()));
        }
        let modules = self.layout.len();
        for (i, task) in self.tasks.iter().enumerate() {
            match task {
                Task::PrepareResource { modules: [a, b], time, .. } => {
                    if a == b || *a >= modules || *b >= modules {
                        return bad(i, format!("modules [{a}, {b}] must be two distinct layout modules"));
                    }
                    if !time.is_finite() {
                        return bad(i, "time must be finite".into());
                    }
                }
                Task::InduceGate { gate, modules: placement, max_rounds, .. } => {
                    let n = gate.arity();
                    if n == 0 {
                        return bad(i, "gate acts on no qubits".into());
                    }
                    let placement: Vec<usize> = placement.clone().unwrap_or_else(|| (0..n).collect());
                    if placement.len() != n {
                        return bad(i, format!("{} modules for a {n}-qubit gate", placement.len()));
                    }
                    for (k, &m) in placement.iter().enumerate() {
                        if m >= modules {
                            return bad(i, format!("module {m} not in the layout ({modules} modules)"));
                        }
                        if placement[..k].contains(&m) {
                            return bad(i, format!("module {m} holds two data qubits"));
                        }
                    }
                    if *max_rounds == Some(0) {
                        return bad(i, "max_rounds must be at least 1".into());
                    }
                    gate.matrix().map_err(|e| Error::Scenario(format!("tasks[{i}].gate: {e}")))?;
                }
                Task::GoldenTrace { .. } => {}
                Task::CostAnalysis { theta, trials, .. } => {
                    if !theta.is_finite() {
                        return bad(i, "theta must be finite".into());
                    }
                    if *trials == Some(0) {
                        return bad(i, "trials must be at least 1".into());
                    }
                }
            }
        }
        Ok(())
    }
}
