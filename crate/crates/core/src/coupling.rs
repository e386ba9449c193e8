//! Physical layer: module geometry, distance-dependent ZZ couplings, logical
//! subspace amplification, and bang-bang scheduling of interaction patterns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::diagonal::{DiagonalGate, GraphSpec};
use crate::error::{Error, Result};
use crate::statevec::StateVector;

pub type Vec3 = [f64; 3];

const BOUNDARY_RTOL: f64 = 1e-12;

fn distance(a: Vec3, b: Vec3) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Pair coupling `f = J / d^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingModel {
    #[serde(rename = "J")]
    pub j: f64,
    pub gamma: f64,
}

impl CouplingModel {
    pub fn new(j: f64, gamma: f64) -> Result<Self> {
        let m = Self { j, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0 && self.j.is_finite()) {
            return Err(Error::InvalidModel(format!("J must be positive, got {}", self.j)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidModel(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Module {
    pub position: Vec3,
    pub unit_size: usize,
    /// Per-qubit displacement from `position`; empty means point-like.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qubit_offsets: Vec<Vec3>,
}

impl Module {
    pub fn point(position: Vec3, unit_size: usize) -> Self {
        Self {
            position,
            unit_size,
            qubit_offsets: Vec::new(),
        }
    }

    pub fn qubit_position(&self, mu: usize) -> Vec3 {
        self.qubit_offsets
            .get(mu)
            .map_or(self.position, |&o| add(self.position, o))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Module>", into = "Vec<Module>")]
pub struct ModuleLayout {
    modules: Vec<Module>,
}

impl TryFrom<Vec<Module>> for ModuleLayout {
    type Error = Error;

    fn try_from(modules: Vec<Module>) -> Result<Self> {
        Self::new(modules)
    }
}

impl From<ModuleLayout> for Vec<Module> {
    fn from(l: ModuleLayout) -> Self {
        l.modules
    }
}

impl ModuleLayout {
    pub fn new(modules: Vec<Module>) -> Result<Self> {
        for (i, m) in modules.iter().enumerate() {
            if m.unit_size == 0 {
                return Err(Error::InvalidLayout(format!("module {i} has an empty entangling unit")));
            }
            if !m.qubit_offsets.is_empty() && m.qubit_offsets.len() != m.unit_size {
                return Err(Error::InvalidLayout(format!(
                    "module {i}: {} offsets for unit size {}",
                    m.qubit_offsets.len(),
                    m.unit_size
                )));
            }
        }
        let layout = Self { modules };
        for i in 0..layout.len() {
            for j in i + 1..layout.len() {
                for mu in 0..layout.modules[i].unit_size {
                    for nu in 0..layout.modules[j].unit_size {
                        let d = layout.physical_distance(i, mu, j, nu);
                        if d.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                            return Err(Error::InvalidLayout(format!(
                                "qubits {i}({mu}) and {j}({nu}) coincide"
                            )));
                        }
                    }
                }
            }
        }
        Ok(layout)
    }

    /// Point-like modules at the given positions.
    pub fn point_like(positions: &[Vec3], unit_sizes: &[usize]) -> Result<Self> {
        if positions.len() != unit_sizes.len() {
            return Err(Error::InvalidLayout("positions and unit sizes differ in length".into()));
        }
        Self::new(
            positions
                .iter()
                .zip(unit_sizes)
                .map(|(&p, &m)| Module::point(p, m))
                .collect(),
        )
    }

    /// Point-like modules spaced `spacing` apart on the x axis.
    pub fn line(unit_sizes: &[usize], spacing: f64) -> Result<Self> {
        let positions: Vec<Vec3> = (0..unit_sizes.len())
            .map(|i| [i as f64 * spacing, 0.0, 0.0])
            .collect();
        Self::point_like(&positions, unit_sizes)
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn modules(&self) -> &[Module] {
        &self.modules
    }

    pub fn module(&self, i: usize) -> Result<&Module> {
        self.modules.get(i).ok_or(Error::ModuleOutOfRange(i))
    }

    pub fn unit_sizes(&self) -> Vec<usize> {
        self.modules.iter().map(|m| m.unit_size).collect()
    }

    /// Total number of entangling qubits.
    pub fn physical_qubits(&self) -> usize {
        self.modules.iter().map(|m| m.unit_size).sum()
    }

    /// Global index of the first entangling qubit of each module, modules laid
    /// out consecutively.
    pub fn offsets(&self) -> Vec<usize> {
        self.modules
            .iter()
            .scan(0, |acc, m| {
                let start = *acc;
                *acc += m.unit_size;
                Some(start)
            })
            .collect()
    }

    pub fn module_distance(&self, i: usize, j: usize) -> f64 {
        distance(self.modules[i].position, self.modules[j].position)
    }

    fn physical_distance(&self, i: usize, mu: usize, j: usize, nu: usize) -> f64 {
        distance(
            self.modules[i].qubit_position(mu),
            self.modules[j].qubit_position(nu),
        )
    }
}

/// Logical-subspace choice `s_μ = 1 - 2k_μ` for one entangling unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Self {
        s.0
    }
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidModel(format!("sign vector must be nonempty and ±1: {signs:?}")));
        }
        Ok(Self(signs))
    }

    /// The trivial subspace `span{|0…0>, |1…1>}`.
    pub fn trivial(m: usize) -> Self {
        Self(vec![1; m.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Basis index (over the unit) of the logical `|0̄>` code word.
    pub fn code_word(&self) -> usize {
        self.0.iter().fold(0, |acc, &s| (acc << 1) | usize::from(s < 0))
    }
}

/// Symmetric logical coupling graph `f̄_ij` with zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            weights: vec![0.0; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(a, b, w) in edges {
            g.set(a, b, w)?;
        }
        Ok(g)
    }

    pub fn set(&mut self, a: usize, b: usize, w: f64) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::ModuleOutOfRange(a.max(b)));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("self-coupling on {a}")));
        }
        self.weights[a * self.n + b] = w;
        self.weights[b * self.n + a] = w;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.n + b]
    }

    /// `(a, b, f̄_ab)` for `a < b` with nonzero weight.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                let w = self.weight(a, b);
                if w != 0.0 {
                    out.push((a, b, w));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    /// Per-module logical subspace; `None` is idle (decoupled).
    pub encodings: Vec<Option<SignVector>>,
    pub duration: f64,
    pub edge: (usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<ScheduleStep>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(|s| s.duration).sum()
    }
}

pub fn pair_strength(d: f64, model: &CouplingModel) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(model.j / d.powf(model.gamma))
}

/// `f̄_ij = Σ_{μν} f_{i(μ),j(ν)} s_{i(μ)} s_{j(ν)}` from exact qubit distances.
pub fn effective_coupling(
    layout: &ModuleLayout,
    model: &CouplingModel,
    i: usize,
    j: usize,
    si: &SignVector,
    sj: &SignVector,
) -> Result<f64> {
    let (mi, mj) = (layout.module(i)?, layout.module(j)?);
    if i == j {
        return Err(Error::InvalidGraph(format!("coupling of module {i} with itself")));
    }
    if si.len() != mi.unit_size || sj.len() != mj.unit_size {
        return Err(Error::InvalidModel(format!(
            "sign vectors of length {}/{} for unit sizes {}/{}",
            si.len(),
            sj.len(),
            mi.unit_size,
            mj.unit_size
        )));
    }
    let mut total = 0.0;
    for (mu, &a) in si.signs().iter().enumerate() {
        for (nu, &b) in sj.signs().iter().enumerate() {
            let f = pair_strength(layout.physical_distance(i, mu, j, nu), model)?;
            total += f * f64::from(a) * f64::from(b);
        }
    }
    Ok(total)
}

/// `m_i m_j J / Δ^γ`.
pub fn approx_coupling(m_i: usize, m_j: usize, delta: f64, model: &CouplingModel) -> Result<f64> {
    Ok((m_i * m_j) as f64 * pair_strength(delta, model)?)
}

/// Smallest equal unit size `m` with `m² J / Δ^γ ≥ target`. The comparison
/// allows a relative slack of 1e-12 so exact boundaries are not lost to
/// rounding in `Δ^γ`.
pub fn required_unit_size(target: f64, delta: f64, model: &CouplingModel) -> Result<usize> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidModel(format!("target coupling must be positive, got {target}")));
    }
    let f = pair_strength(delta, model)?;
    let enough = |m: usize| (m * m) as f64 * f >= target * (1.0 - BOUNDARY_RTOL);
    let mut m = ((target / f).sqrt().ceil() as usize).max(1);
    while m > 1 && enough(m - 1) {
        m -= 1;
    }
    while !enough(m) {
        m += 1;
    }
    Ok(m)
}

/// Logical coupling graph for the given per-module subspaces.
pub fn logical_hamiltonian(
    layout: &ModuleLayout,
    model: &CouplingModel,
    signs: &[SignVector],
) -> Result<WeightedGraph> {
    if signs.len() != layout.len() {
        return Err(Error::InvalidModel(format!(
            "{} sign vectors for {} modules",
            signs.len(),
            layout.len()
        )));
    }
    let mut g = WeightedGraph::new(layout.len());
    for i in 0..layout.len() {
        for j in i + 1..layout.len() {
            g.set(i, j, effective_coupling(layout, model, i, j, &signs[i], &signs[j])?)?;
        }
    }
    Ok(g)
}

/// Couplings between all entangling qubits of different modules, indexed by
/// [`ModuleLayout::offsets`].
pub fn physical_hamiltonian(layout: &ModuleLayout, model: &CouplingModel) -> Result<WeightedGraph> {
    let offsets = layout.offsets();
    let mut g = WeightedGraph::new(layout.physical_qubits());
    for i in 0..layout.len() {
        for j in i + 1..layout.len() {
            for mu in 0..layout.modules[i].unit_size {
                for nu in 0..layout.modules[j].unit_size {
                    let f = pair_strength(layout.physical_distance(i, mu, j, nu), model)?;
                    g.set(offsets[i] + mu, offsets[j] + nu, f)?;
                }
            }
        }
    }
    Ok(g)
}

/// Diagonal gate `exp(i t Σ_{a<b} w_ab Z_a Z_b)` over the graph's vertices.
pub fn zz_gate(graph: &WeightedGraph, t: f64) -> DiagonalGate {
    let n = graph.len();
    let edges = graph.edges();
    let alpha = (0..1usize << n)
        .map(|i| {
            edges
                .iter()
                .map(|&(a, b, w)| {
                    w * t * bits::sign(i, bits::qubit_mask(n, a) | bits::qubit_mask(n, b))
                })
                .sum()
        })
        .collect();
    DiagonalGate::new(alpha).expect("graph size is a power-of-two phase vector")
}

pub fn evolve_zz(state: &StateVector, graph: &WeightedGraph, t: f64) -> Result<StateVector> {
    let n = state.n_qubits();
    if graph.len() != n {
        return Err(Error::DimensionMismatch(graph.len(), n));
    }
    let edges = graph.edges();
    Ok(state.map_phases(|i| {
        edges
            .iter()
            .map(|&(a, b, w)| w * t * bits::sign(i, bits::qubit_mask(n, a) | bits::qubit_mask(n, b)))
            .sum()
    }))
}

/// Bang-bang realization of a target graph gate: one step per edge, both
/// endpoints in the trivial subspace (one flipped when the angle is negative),
/// all other modules idle.
pub fn schedule_pattern(
    target: &GraphSpec,
    layout: &ModuleLayout,
    model: &CouplingModel,
) -> Result<Schedule> {
    if target.vertices() != layout.len() {
        return Err(Error::InvalidLayout(format!(
            "target graph has {} vertices, layout has {} modules",
            target.vertices(),
            layout.len()
        )));
    }
    let mut steps = Vec::with_capacity(target.edges().len());
    for e in target.edges() {
        let (a, b) = (e.a, e.b);
        let sa = SignVector::trivial(layout.module(a)?.unit_size);
        let mut sb = SignVector::trivial(layout.module(b)?.unit_size);
        let f = effective_coupling(layout, model, a, b, &sa, &sb)?;
        if f == 0.0 {
            return Err(Error::ZeroCoupling(a, b));
        }
        let mut duration = e.angle / f;
        if duration < 0.0 {
            sb = sb.flipped();
            duration = -duration;
        }
        let mut encodings = vec![None; layout.len()];
        encodings[a] = Some(sa);
        encodings[b] = Some(sb);
        steps.push(ScheduleStep {
            encodings,
            duration,
            edge: (a, b),
        });
    }
    Ok(Schedule { steps })
}

/// Logical graph active during one step; idle modules are decoupled.
pub fn step_hamiltonian(
    step: &ScheduleStep,
    layout: &ModuleLayout,
    model: &CouplingModel,
) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new(layout.len());
    for i in 0..layout.len() {
        for j in i + 1..layout.len() {
            if let (Some(si), Some(sj)) = (&step.encodings[i], &step.encodings[j]) {
                g.set(i, j, effective_coupling(layout, model, i, j, si, sj)?)?;
            }
        }
    }
    Ok(g)
}

/// Runs a schedule on a logical register (one qubit per module).
pub fn execute_schedule(
    state: &StateVector,
    schedule: &Schedule,
    layout: &ModuleLayout,
    model: &CouplingModel,
) -> Result<StateVector> {
    schedule.steps.iter().try_fold(state.clone(), |s, step| {
        evolve_zz(&s, &step_hamiltonian(step, layout, model)?, step.duration)
    })
}

/// Checks that random internal ZZ couplings of an `m`-qubit unit act as a
/// multiple of the identity on the trivial code space.
pub fn verify_internal_action(m: usize) -> bool {
    if m < 2 || m >= usize::BITS as usize {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + m as u64);
    let mut couplings = Vec::new();
    for mu in 0..m {
        for nu in mu + 1..m {
            couplings.push((bits::qubit_mask(m, mu) | bits::qubit_mask(m, nu), rng.random_range(0.1..2.0)));
        }
    }
    let energy = |index: usize| -> f64 { couplings.iter().map(|&(mask, f)| f * bits::sign(index, mask)).sum() };
    (energy(0) - energy((1 << m) - 1)).abs() < 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::{from_rotations, gate_state, graph_gate, WalshSpectrum};
    use crate::statevec::fidelity_up_to_phase;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn unit() -> CouplingModel {
        CouplingModel::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn pair_strength_values() {
        assert_eq!(pair_strength(1.0, &unit()).unwrap(), 1.0);
        assert_eq!(pair_strength(2.0, &unit()).unwrap(), 0.25);
        let dipole = CouplingModel::new(1.0, 6.0).unwrap();
        assert!((pair_strength(3.0, &dipole).unwrap() - 1.0 / 729.0).abs() < 1e-15);
        assert!(pair_strength(0.0, &unit()).is_err());
        assert!(CouplingModel::new(1.0, 0.0).is_err());
        assert!(CouplingModel::new(-1.0, 2.0).is_err());
    }

    #[test]
    fn effective_coupling_examples() {
        let layout = ModuleLayout::line(&[2, 3], 1.0).unwrap();
        let f = effective_coupling(&layout, &unit(), 0, 1, &SignVector::trivial(2), &SignVector::trivial(3)).unwrap();
        assert!((f - 6.0).abs() < 1e-12);
        let single = ModuleLayout::line(&[1, 1], 3.0).unwrap();
        let f = effective_coupling(&single, &unit(), 0, 1, &SignVector::trivial(1), &SignVector::trivial(1)).unwrap();
        assert_eq!(f, pair_strength(3.0, &unit()).unwrap());
        let two = ModuleLayout::line(&[2, 2], 1.0).unwrap();
        let mixed = SignVector::new(vec![1, -1]).unwrap();
        let f = effective_coupling(&two, &unit(), 0, 1, &mixed, &SignVector::trivial(2)).unwrap();
        assert_eq!(f, 0.0);
        assert!(effective_coupling(&two, &unit(), 0, 2, &mixed, &mixed).is_err());
    }

    #[test]
    fn approximate_coupling() {
        assert_eq!(approx_coupling(1, 1, 2.0, &unit()).unwrap(), 0.25);
        assert!((approx_coupling(3, 3, 2.0, &unit()).unwrap() - 2.25).abs() < 1e-15);
    }

    /// Random unit of `m` qubits centered on the module position, diameter at
    /// most `extent`.
    fn centered_offsets(rng: &mut ChaCha8Rng, m: usize, extent: f64) -> Vec<Vec3> {
        let raw: Vec<Vec3> = (0..m)
            .map(|_| [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)])
            .collect();
        let mean: Vec3 = [0, 1, 2].map(|k| raw.iter().map(|v| v[k]).sum::<f64>() / m as f64);
        let centered: Vec<Vec3> = raw.iter().map(|v| [0, 1, 2].map(|k| v[k] - mean[k])).collect();
        let radius = centered.iter().map(|&v| distance(v, [0.0; 3])).fold(1e-12, f64::max);
        centered.iter().map(|v| v.map(|x| x / radius * extent / 2.0)).collect()
    }

    #[test]
    fn approximation_quality_for_distant_modules() {
        // Relative error is second order in extent/Δ with a γ-dependent
        // prefactor; at Δ ≥ 10γ·extent it stays below 1%.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for gamma in [1.0, 2.0, 3.0, 6.0] {
            let model = CouplingModel::new(1.0, gamma).unwrap();
            for _ in 0..200 {
                let (mi, mj) = (rng.random_range(1..=5), rng.random_range(1..=5));
                let extent: f64 = rng.random_range(0.1..1.0);
                let delta = 10.0 * gamma * extent * rng.random_range(1.0..3.0);
                let layout = ModuleLayout::new(vec![
                    Module { position: [0.0; 3], unit_size: mi, qubit_offsets: centered_offsets(&mut rng, mi, extent) },
                    Module { position: [delta, 0.0, 0.0], unit_size: mj, qubit_offsets: centered_offsets(&mut rng, mj, extent) },
                ])
                .unwrap();
                let exact = effective_coupling(&layout, &model, 0, 1, &SignVector::trivial(mi), &SignVector::trivial(mj)).unwrap();
                let approx = approx_coupling(mi, mj, delta, &model).unwrap();
                assert!(((exact - approx) / exact).abs() < 0.01, "gamma {gamma}");
            }
        }
    }

    #[test]
    fn unit_size_requirements() {
        assert_eq!(required_unit_size(1.0, 1.0, &unit()).unwrap(), 1);
        assert_eq!(required_unit_size(1.0, 4.0, &unit()).unwrap(), 4);
        let dipole = CouplingModel::new(1.0, 6.0).unwrap();
        let m = required_unit_size(1.0, 3.0, &dipole).unwrap();
        // brute-force scan with exact integer arithmetic: m² ≥ 3^6
        let scan = (1usize..).find(|m| m * m >= 729).unwrap();
        assert_eq!(m, scan);
        assert_eq!(m, 27);
        for (target, delta, gamma) in [(2.5, 3.0, 2.0), (0.1, 7.0, 1.5), (10.0, 2.0, 3.0)] {
            let model = CouplingModel::new(1.0, gamma).unwrap();
            let f = pair_strength(delta, &model).unwrap();
            let m = required_unit_size(target, delta, &model).unwrap();
            let scan = (1usize..).find(|&k| (k * k) as f64 * f >= target * (1.0 - 1e-12)).unwrap();
            assert_eq!(m, scan);
        }
    }

    fn brute_force_graph(layout: &ModuleLayout, model: &CouplingModel) -> Vec<f64> {
        let n = layout.len();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for mu in 0..layout.modules()[i].unit_size {
                    for nu in 0..layout.modules()[j].unit_size {
                        let d = distance(layout.modules()[i].qubit_position(mu), layout.modules()[j].qubit_position(nu));
                        w[i * n + j] += model.j / d.powf(model.gamma);
                    }
                }
            }
        }
        w
    }

    #[test]
    fn logical_hamiltonian_examples() {
        let two = ModuleLayout::line(&[2, 3], 2.0).unwrap();
        let g = logical_hamiltonian(&two, &unit(), &[SignVector::trivial(2), SignVector::trivial(3)]).unwrap();
        assert!((g.weight(0, 1) - 1.5).abs() < 1e-12);
        let line = ModuleLayout::line(&[2, 2, 2], 1.0).unwrap();
        let g = logical_hamiltonian(&line, &unit(), &vec![SignVector::trivial(2); 3]).unwrap();
        assert!(g.weight(0, 1) > g.weight(0, 2));
        let offsets = vec![[0.05, 0.0, 0.0], [-0.05, 0.02, 0.0]];
        let square = ModuleLayout::new(
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
                .iter()
                .map(|&p| Module { position: p, unit_size: 2, qubit_offsets: offsets.clone() })
                .collect(),
        )
        .unwrap();
        let g = logical_hamiltonian(&square, &unit(), &vec![SignVector::trivial(2); 4]).unwrap();
        let oracle = brute_force_graph(&square, &unit());
        for i in 0..4 {
            for j in 0..4 {
                assert!((g.weight(i, j) - oracle[i * 4 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sign_flip_negates_incident_couplings() {
        let layout = ModuleLayout::line(&[2, 3, 1], 1.5).unwrap();
        let s = vec![SignVector::new(vec![1, -1]).unwrap(), SignVector::trivial(3), SignVector::trivial(1)];
        let g = logical_hamiltonian(&layout, &unit(), &s).unwrap();
        let mut flipped = s.clone();
        flipped[1] = flipped[1].flipped();
        let h = logical_hamiltonian(&layout, &unit(), &flipped).unwrap();
        assert!((g.weight(0, 1) + h.weight(0, 1)).abs() < 1e-12);
        assert!((g.weight(1, 2) + h.weight(1, 2)).abs() < 1e-12);
        assert!((g.weight(0, 2) - h.weight(0, 2)).abs() < 1e-12);
    }

    #[test]
    fn evolve_zz_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = StateVector::random(3, &mut rng).unwrap();
        let g = WeightedGraph::from_edges(3, &[(0, 1, 0.7), (1, 2, -0.2)]).unwrap();
        assert_eq!(evolve_zz(&psi, &g, 0.0).unwrap(), psi);
        let single = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let out = evolve_zz(&StateVector::plus(2).unwrap(), &single, FRAC_PI_4).unwrap();
        let expect = gate_state(&DiagonalGate::zz(FRAC_PI_4)).unwrap();
        assert!(fidelity_up_to_phase(&out, &expect).unwrap() > 1.0 - 1e-12);
        let split = evolve_zz(&evolve_zz(&psi, &g, 0.4).unwrap(), &g, 0.9).unwrap();
        let joint = evolve_zz(&psi, &g, 1.3).unwrap();
        assert!(fidelity_up_to_phase(&split, &joint).unwrap() > 1.0 - 1e-12);
        assert!(evolve_zz(&psi, &single, 1.0).is_err());
    }

    #[test]
    fn evolve_matches_two_bit_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 4;
        let mut g = WeightedGraph::new(n);
        let mut theta = vec![0.0; 16];
        let t = 0.37;
        for a in 0..n {
            for b in a + 1..n {
                let w: f64 = rng.random_range(-1.0..1.0);
                g.set(a, b, w).unwrap();
                theta[bits::mask_of(n, &[a, b])] = w * t;
            }
        }
        let psi = StateVector::random(n, &mut rng).unwrap();
        let got = evolve_zz(&psi, &g, t).unwrap();
        let gate = from_rotations(&WalshSpectrum::new(theta).unwrap());
        let want = psi.apply_diagonal(&gate, &[0, 1, 2, 3]).unwrap();
        assert!(fidelity_up_to_phase(&got, &want).unwrap() > 1.0 - 1e-12);
        assert!(zz_gate(&g, t).approx_eq_up_to_phase(&gate, 1e-12));
    }

    #[test]
    fn schedules() {
        let layout = ModuleLayout::line(&[1, 1], 1.0).unwrap();
        let model = CouplingModel::new(2.0, 2.0).unwrap();
        assert!(schedule_pattern(&GraphSpec::new(2, &[]).unwrap(), &layout, &model).unwrap().is_empty());
        let s = schedule_pattern(&GraphSpec::new(2, &[(0, 1)]).unwrap(), &layout, &model).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.steps[0].duration - PI / 8.0).abs() < 1e-15);

        let square = ModuleLayout::point_like(
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
            &[2, 3, 2, 1],
        )
        .unwrap();
        let target = GraphSpec::uniform(4, &[(0, 2), (0, 3), (1, 3), (2, 3)], PI / 16.0).unwrap();
        let s = schedule_pattern(&target, &square, &unit()).unwrap();
        assert_eq!(s.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = StateVector::random(4, &mut rng).unwrap();
        let got = execute_schedule(&psi, &s, &square, &unit()).unwrap();
        let want = psi.apply_diagonal(&graph_gate(&target), &[0, 1, 2, 3]).unwrap();
        assert!(fidelity_up_to_phase(&got, &want).unwrap() > 1.0 - 1e-9);

        let negative = GraphSpec::with_angles(4, &[(0, 1, -0.3), (1, 2, 0.2)]).unwrap();
        let s = schedule_pattern(&negative, &square, &unit()).unwrap();
        assert!(s.steps.iter().all(|st| st.duration >= 0.0));
        let got = execute_schedule(&psi, &s, &square, &unit()).unwrap();
        let want = psi.apply_diagonal(&graph_gate(&negative), &[0, 1, 2, 3]).unwrap();
        assert!(fidelity_up_to_phase(&got, &want).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let far = ModuleLayout::line(&[1, 1], 1e200).unwrap();
        let steep = CouplingModel::new(1.0, 10.0).unwrap();
        let target = GraphSpec::new(2, &[(0, 1)]).unwrap();
        assert!(matches!(schedule_pattern(&target, &far, &steep), Err(Error::ZeroCoupling(0, 1))));
        // A split unit whose two qubits sit at equal distance cancels under (+, -).
        let layout = ModuleLayout::new(vec![
            Module { position: [0.0; 3], unit_size: 2, qubit_offsets: vec![[0.0, 0.1, 0.0], [0.0, -0.1, 0.0]] },
            Module::point([1.0, 0.0, 0.0], 1),
        ])
        .unwrap();
        let step = ScheduleStep {
            encodings: vec![Some(SignVector::new(vec![1, -1]).unwrap()), Some(SignVector::trivial(1))],
            duration: 1.0,
            edge: (0, 1),
        };
        assert!(step_hamiltonian(&step, &layout, &unit()).unwrap().weight(0, 1).abs() < 1e-15);
    }

    #[test]
    fn internal_action() {
        for m in 2..=6 {
            assert!(verify_internal_action(m));
        }
        assert!(!verify_internal_action(1));
    }

    #[test]
    fn layout_validation() {
        assert!(ModuleLayout::line(&[1, 0], 1.0).is_err());
        assert!(ModuleLayout::point_like(&[[0.0; 3], [0.0; 3]], &[1, 1]).is_err());
        let bad = Module { position: [0.0; 3], unit_size: 2, qubit_offsets: vec![[0.0; 3]] };
        assert!(ModuleLayout::new(vec![bad]).is_err());
        assert_eq!(ModuleLayout::line(&[2, 3, 1], 1.0).unwrap().offsets(), vec![0, 2, 5]);
        assert!(SignVector::new(vec![1, 0]).is_err());
        assert_eq!(SignVector::new(vec![1, -1, -1]).unwrap().code_word(), 0b011);
    }
}
