//! Quick property suite behind `modnet verify`.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits;
use crate::cli::{golden, parse_scenario, run_scenario};
use crate::cost::{cost_threshold, monte_carlo_cost};
use crate::coupling::{effective_coupling, CouplingModel, ModuleLayout, SignVector};
use crate::diagonal::{from_rotations, gate_state, walsh_spectrum, DiagonalGate, WalshSpectrum};
use crate::encoding::{bell_pair, cat_state, merge_swap, SwapMode};
use crate::error::Result;
use crate::gates;
use crate::induction::{
    induce_clifford_diagonal, induce_clifford_general, induce_rotation_ghz, iterate_toffoli, routine_t,
    toffoli_ghz_gate_count, DEFAULT_MAX_ROUNDS,
};
use crate::statevec::{fidelity_up_to_phase, StateVector};

const SEED: u64 = 0x6d6f_646e;
const FID: f64 = 1.0 - 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn branches(len: usize) -> impl Iterator<Item = Vec<Vec<u8>>> {
    (0..1usize << len).map(move |b| vec![bits::to_bits(b, len)])
}

fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> DiagonalGate {
    DiagonalGate::new((0..1 << n).map(|_| rng.random_range(-PI..PI)).collect()).expect("power of two")
}

fn random_clifford(n: usize, rng: &mut ChaCha8Rng) -> DiagonalGate {
    let theta = (0..1 << n).map(|_| rng.random_range(0..8) as f64 * FRAC_PI_4).collect();
    from_rotations(&WalshSpectrum::new(theta).expect("power of two"))
}

fn uniformity(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for _ in 0..5 {
            let resource = gate_state(&random_gate(n, rng))?;
            let psi = StateVector::random(n, rng)?;
            for f in branches(n) {
                let p = routine_t(&resource, &psi, Some(&f[0]), rng)?.probability;
                worst = worst.max((p - 0.5f64.powi(n as i32)).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn clifford_determinism(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 1.0;
    for i in 0..20 {
        let n = 1 + i % 4;
        let g = random_clifford(n, rng);
        let psi = StateVector::random(n, rng)?;
        let want = psi.apply_diagonal(&g, &(0..n).collect::<Vec<_>>())?;
        for f in branches(n) {
            let (post, _) = induce_clifford_diagonal(&g, &psi, &f, rng)?;
            worst = worst.min(fidelity_up_to_phase(&post, &want)?);
        }
    }
    Ok((worst >= FID, format!("min fidelity {worst:.12}")))
}

fn choi_route(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 1.0;
    for u in [gates::h(), gates::cx(), gates::swap()] {
        let n = gates::arity(&u).expect("qubit gate");
        let psi = StateVector::random(n, rng)?;
        let want = psi.apply_gate(&u, &(0..n).collect::<Vec<_>>())?;
        for f in branches(2 * n) {
            let (post, _) = induce_clifford_general(&u, &psi, &f, rng)?;
            worst = worst.min(fidelity_up_to_phase(&post, &want)?);
        }
    }
    Ok((worst >= FID, format!("min fidelity {worst:.12}")))
}

fn ghz_rotation(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 1.0;
    for n in 2..=4 {
        let theta = rng.random_range(-PI..PI);
        let mask = (1 << n) - 1;
        let psi = StateVector::random(n, rng)?;
        let want = psi.apply_diagonal(&DiagonalGate::rotation(n, mask, theta), &(0..n).collect::<Vec<_>>())?;
        for f in branches(n) {
            let (post, _) = induce_rotation_ghz(theta, mask, &psi, &f, rng)?;
            worst = worst.min(fidelity_up_to_phase(&post, &want)?);
        }
    }
    Ok((worst >= FID, format!("min fidelity {worst:.12}")))
}

fn toffoli(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let psi = StateVector::random(3, rng)?;
    let mut first = 0.0;
    let mut ok = true;
    for f in branches(3) {
        let (_, rec) = iterate_toffoli(3, &psi, &f, rng, DEFAULT_MAX_ROUNDS)?;
        if rec.rounds[0].success {
            first += rec.rounds[0].probability;
        }
        ok &= rec.succeeded;
    }
    Ok((ok && (first - 0.125).abs() < 1e-12, format!("round-1 success probability {first}")))
}

fn amplification() -> Result<(bool, String)> {
    let model = CouplingModel::new(1.0, 3.0)?;
    let mut worst: f64 = 0.0;
    for mi in 1..=5 {
        for mj in 1..=5 {
            let layout = ModuleLayout::line(&[mi, mj], 2.0)?;
            let f = effective_coupling(&layout, &model, 0, 1, &SignVector::trivial(mi), &SignVector::trivial(mj))?;
            let want = (mi * mj) as f64 / 8.0;
            worst = worst.max((f - want).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn swapping(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let start = bell_pair().tensor(&bell_pair())?;
    let mut worst: f64 = 1.0;
    for b in 0..2u8 {
        let res = merge_swap(&start, (1, 2), SwapMode::Ghz, Some(&[b]), rng)?;
        worst = worst.min(fidelity_up_to_phase(&res.state.extract(&[0, 1, 3])?, &cat_state(3)?)?);
    }
    Ok((worst >= FID, format!("min fidelity {worst:.12}")))
}

fn walsh(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let g = random_gate(1 + i % 5, rng);
        worst = worst.max(from_rotations(&walsh_spectrum(&g)).distance_up_to_phase(&g));
    }
    let cz = walsh_spectrum(&DiagonalGate::cz());
    let want = [FRAC_PI_4, -FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4];
    let cz_ok = cz.angles().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12);
    Ok((worst <= 1e-9 && cz_ok, format!("max reconstruction error {worst:.2e}")))
}

const DETERMINISM_SCENARIO: &str = r#"{
  "seed": 11,
  "trials": 200,
  "layout": [
    {"position": [0, 0, 0], "unit_size": 2},
    {"position": [3, 0, 0], "unit_size": 2},
    {"position": [6, 0, 0], "unit_size": 1}
  ],
  "coupling": {"J": 1.0, "gamma": 3.0},
  "tasks": [
    {"kind": "prepare-resource", "modules": [0, 1], "time": 0.7, "dynamic_decode": true},
    {"kind": "induce-gate", "gate": {"type": "zz", "theta": 0.3}, "protocol": "iterative-rotation"},
    {"kind": "induce-gate", "gate": {"type": "toffoli", "qubits": 3}, "protocol": "toffoli"},
    {"kind": "cost-analysis", "theta": 0.1}
  ]
}"#;

fn determinism() -> Result<(bool, String)> {
    let s = parse_scenario(DETERMINISM_SCENARIO)?;
    let a = run_scenario(&s);
    let b = run_scenario(&s);
    let same = a.without_timing().to_json() == b.without_timing().to_json();
    let replay = run_scenario(&crate::cli::replay_scenario(&s, &a)?);
    let fidelities = |r: &crate::cli::Report| r.tasks.iter().map(|t| t.fidelity.map(f64::to_bits)).collect::<Vec<_>>();
    let replayed = fidelities(&a) == fidelities(&replay);
    Ok((same && replayed && a.all_passed(), format!("identical: {same}, replay: {replayed}")))
}

/// Runs every check with a fixed seed.
pub fn run_all() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = Vec::new();
    let mut push = |name: &'static str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        checks.push(Check { name, passed, detail });
    };
    push("routine-t outcome uniformity", uniformity(&mut rng));
    push("clifford diagonal determinism", clifford_determinism(&mut rng));
    push("choi route determinism", choi_route(&mut rng));
    push("ghz rotation determinism", ghz_rotation(&mut rng));
    push(
        "pairwise golden trace",
        golden::appendix_e(SEED).map(|g| (g.passed, format!("{} rounds, fidelity {:.12}", g.rounds, g.fidelity))),
    );
    push("toffoli round-1 success", toffoli(&mut rng));
    push(
        "expected rounds",
        monte_carlo_cost(0.3, 4000, SEED).map(|m| {
            ((m.mean_rounds - 2.0).abs() < 0.1, format!("mean rounds {:.4} ± {:.4}", m.mean_rounds, m.stderr_rounds))
        }),
    );
    push("cost threshold", {
        let t = cost_threshold();
        Ok(((0.2240..=0.2250).contains(&t), format!("{t:.6} rad")))
    });
    push(
        "toffoli gate count",
        (|| {
            let c = [toffoli_ghz_gate_count(3)?, toffoli_ghz_gate_count(4)?, toffoli_ghz_gate_count(5)?];
            Ok((c == [5, 17, 49], format!("{c:?}")))
        })(),
    );
    push("amplification law", amplification());
    push("entanglement swapping", swapping(&mut rng));
    push("walsh round trip", walsh(&mut rng));
    push("report determinism and replay", determinism());
    checks
}
