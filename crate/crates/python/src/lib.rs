//! Python bindings for the modnet simulator.

use modnet::coupling::{self, CouplingModel, ModuleLayout, SignVector};
use modnet::diagonal::{self, CLIFFORD_TOL};
use modnet::induction::{self, InductionRecord, DEFAULT_MAX_ROUNDS};
use modnet::{cli, cost, statevec};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: modnet::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, value: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Induction result as `(state, record_dict)`.
fn outcome(py: Python<'_>, (state, record): (statevec::StateVector, InductionRecord)) -> PyResult<(StateVector, Py<PyAny>)> {
    Ok((StateVector(state), json_to_py(py, &record)?))
}

/// Pure state of `n` qubits; qubit 0 is the most significant bit.
#[pyclass(module = "modnet_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct StateVector(statevec::StateVector);

#[pymethods]
impl StateVector {
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        statevec::StateVector::from_amplitudes(amplitudes).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zero(n: usize) -> PyResult<Self> {
        statevec::StateVector::zero(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn plus(n: usize) -> PyResult<Self> {
        statevec::StateVector::plus(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        statevec::StateVector::random(n, &mut rng(seed)).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn apply_gate(&self, matrix: Vec<Vec<Complex64>>, targets: Vec<usize>) -> PyResult<Self> {
        let d = matrix.len();
        if matrix.iter().any(|row| row.len() != d) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = modnet::gates::Matrix::from_fn(d, d, |r, c| matrix[r][c]);
        self.0.apply_gate(&m, &targets).map(Self).map_err(err)
    }

    fn apply_diagonal(&self, gate: &DiagonalGate, targets: Vec<usize>) -> PyResult<Self> {
        self.0.apply_diagonal(&gate.0, &targets).map(Self).map_err(err)
    }

    fn tensor(&self, other: &StateVector) -> PyResult<Self> {
        self.0.tensor(&other.0).map(Self).map_err(err)
    }

    fn fidelity(&self, other: &StateVector) -> PyResult<f64> {
        statevec::fidelity_up_to_phase(&self.0, &other.0).map_err(err)
    }

    fn entanglement_entropy(&self, part: Vec<usize>) -> PyResult<f64> {
        self.0.entanglement_entropy(&part).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("StateVector(n_qubits={})", self.0.n_qubits())
    }
}

/// Diagonal unitary `diag(exp(i α))` with phases wrapped to (-π, π].
#[pyclass(module = "modnet_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct DiagonalGate(diagonal::DiagonalGate);

#[pymethods]
impl DiagonalGate {
    #[new]
    fn new(phases: Vec<f64>) -> PyResult<Self> {
        diagonal::DiagonalGate::new(phases).map(Self).map_err(err)
    }

    #[staticmethod]
    fn cz() -> Self {
        Self(diagonal::DiagonalGate::cz())
    }

    #[staticmethod]
    fn zz(theta: f64) -> Self {
        Self(diagonal::DiagonalGate::zz(theta))
    }

    #[staticmethod]
    fn rotation(n: usize, mask: usize, theta: f64) -> Self {
        Self(diagonal::DiagonalGate::rotation(n, mask, theta))
    }

    /// Gate with the given Walsh angles, indexed by Z-mask.
    #[staticmethod]
    fn from_rotations(angles: Vec<f64>) -> PyResult<Self> {
        let s = diagonal::WalshSpectrum::new(angles).map_err(err)?;
        Ok(Self(diagonal::from_rotations(&s)))
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.arity()
    }

    fn phases(&self) -> Vec<f64> {
        self.0.phases().to_vec()
    }

    fn walsh_spectrum(&self) -> Vec<f64> {
        diagonal::walsh_spectrum(&self.0).angles().to_vec()
    }

    fn is_clifford(&self) -> bool {
        diagonal::is_clifford(&self.0, CLIFFORD_TOL)
    }

    fn compose(&self, other: &DiagonalGate) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(err)
    }

    fn gate_state(&self) -> PyResult<StateVector> {
        diagonal::gate_state(&self.0).map(StateVector).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DiagonalGate(n_qubits={})", self.0.arity())
    }
}

/// Effective logical coupling between modules `i` and `j` of point-like
/// modules with the trivial sign vectors.
#[pyfunction]
fn effective_coupling(
    positions: Vec<[f64; 3]>,
    unit_sizes: Vec<usize>,
    j_coupling: f64,
    gamma: f64,
    i: usize,
    j: usize,
) -> PyResult<f64> {
    let layout = ModuleLayout::point_like(&positions, &unit_sizes).map_err(err)?;
    let model = CouplingModel::new(j_coupling, gamma).map_err(err)?;
    let (mi, mj) = (layout.module(i).map_err(err)?.unit_size, layout.module(j).map_err(err)?.unit_size);
    coupling::effective_coupling(&layout, &model, i, j, &SignVector::trivial(mi), &SignVector::trivial(mj))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (gate, state, seed, forced = None))]
fn induce_clifford_diagonal(
    py: Python<'_>,
    gate: &DiagonalGate,
    state: &StateVector,
    seed: u64,
    forced: Option<Vec<Vec<u8>>>,
) -> PyResult<(StateVector, Py<PyAny>)> {
    let f = forced.unwrap_or_default();
    outcome(py, induction::induce_clifford_diagonal(&gate.0, &state.0, &f, &mut rng(seed)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (theta, mask, state, seed, forced = None))]
fn induce_rotation_ghz(
    py: Python<'_>,
    theta: f64,
    mask: usize,
    state: &StateVector,
    seed: u64,
    forced: Option<Vec<Vec<u8>>>,
) -> PyResult<(StateVector, Py<PyAny>)> {
    let f = forced.unwrap_or_default();
    outcome(py, induction::induce_rotation_ghz(theta, mask, &state.0, &f, &mut rng(seed)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (theta, mask, state, seed, forced = None, max_rounds = DEFAULT_MAX_ROUNDS))]
fn iterate_rotation(
    py: Python<'_>,
    theta: f64,
    mask: usize,
    state: &StateVector,
    seed: u64,
    forced: Option<Vec<Vec<u8>>>,
    max_rounds: usize,
) -> PyResult<(StateVector, Py<PyAny>)> {
    let f = forced.unwrap_or_default();
    outcome(py, induction::iterate_rotation(theta, mask, &state.0, &f, &mut rng(seed), max_rounds).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, state, seed, forced = None, max_rounds = DEFAULT_MAX_ROUNDS))]
fn iterate_toffoli(
    py: Python<'_>,
    n: usize,
    state: &StateVector,
    seed: u64,
    forced: Option<Vec<Vec<u8>>>,
    max_rounds: usize,
) -> PyResult<(StateVector, Py<PyAny>)> {
    let f = forced.unwrap_or_default();
    outcome(py, induction::iterate_toffoli(n, &state.0, &f, &mut rng(seed), max_rounds).map_err(err)?)
}

#[pyfunction]
fn toffoli_ghz_gate_count(n: usize) -> PyResult<u64> {
    induction::toffoli_ghz_gate_count(n).map_err(err)
}

#[pyfunction]
fn expected_cost(theta: f64) -> f64 {
    cost::expected_cost(theta)
}

#[pyfunction]
fn cost_threshold() -> f64 {
    cost::cost_threshold()
}

#[pyfunction]
fn cost_profile(py: Python<'_>, theta: f64) -> PyResult<Py<PyAny>> {
    json_to_py(py, &cost::cost_profile(theta))
}

#[pyfunction]
fn monte_carlo_cost(py: Python<'_>, theta: f64, trials: usize, seed: u64) -> PyResult<Py<PyAny>> {
    json_to_py(py, &cost::monte_carlo_cost(theta, trials, seed).map_err(err)?)
}

/// Parses and runs a scenario given as JSON text; returns the report.
#[pyfunction]
fn run_scenario(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let scenario = cli::parse_scenario(text).map_err(err)?;
    json_to_py(py, &cli::run_scenario(&scenario))
}

#[pyfunction]
fn golden_appendix_e(py: Python<'_>, seed: u64) -> PyResult<Py<PyAny>> {
    json_to_py(py, &cli::golden::appendix_e(seed).map_err(err)?)
}

#[pymodule]
fn modnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<StateVector>()?;
    m.add_class::<DiagonalGate>()?;
    m.add_function(wrap_pyfunction!(effective_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(induce_clifford_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(induce_rotation_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_toffoli, m)?)?;
    m.add_function(wrap_pyfunction!(toffoli_ghz_gate_count, m)?)?;
    m.add_function(wrap_pyfunction!(expected_cost, m)?)?;
    m.add_function(wrap_pyfunction!(cost_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(cost_profile, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_cost, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(golden_appendix_e, m)?)?;
    Ok(())
}
