//! Entanglement cost of two-qubit rotations: deterministic Bell route versus
//! the repeat-until-success gate-state route.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induction::{iterate_rotation, DEFAULT_MAX_ROUNDS};
use crate::statevec::StateVector;

/// Number of series terms; the tail after this many is below `1e-12`.
pub const SERIES_TERMS: usize = 43;

const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyTag {
    Iterative,
    BellDeterministic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CostProfile {
    pub theta: f64,
    /// `E(2^{k-1} θ)` for each round `k`.
    pub per_round_cost: Vec<f64>,
    pub expected_cost: f64,
    pub deterministic_cost: f64,
    pub preferred: StrategyTag,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MonteCarloCost {
    pub trials: usize,
    pub mean_rounds: f64,
    pub stderr_rounds: f64,
    pub mean_ebits: f64,
    pub stderr_ebits: f64,
    /// Trials that hit the round cap.
    pub failures: usize,
}

fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    h(x) + h(1.0 - x)
}

/// Entanglement of the gate state of `exp(iθ ZZ)`, `H₂(cos²θ)`.
pub fn rotation_entropy(theta: f64) -> f64 {
    binary_entropy(theta.cos().powi(2)).clamp(0.0, 1.0)
}

/// Expected ebits of the iterative protocol, `Σ_k 2^{-(k-1)} E(2^{k-1} θ)`.
pub fn expected_cost(theta: f64) -> f64 {
    profile_terms(theta)
        .iter()
        .enumerate()
        .map(|(k, e)| e / (1u64 << k) as f64)
        .sum()
}

fn profile_terms(theta: f64) -> Vec<f64> {
    let mut angle = theta;
    (0..SERIES_TERMS)
        .map(|_| {
            let e = rotation_entropy(angle);
            angle *= 2.0;
            e
        })
        .collect()
}

/// Root of `expected_cost(θ) = 1` below π/4, in radians.
pub fn cost_threshold() -> f64 {
    // expected_cost is not monotone on (0, π/4), so locate the first crossing
    // on a grid before bisecting.
    let steps = 4000;
    let h = FRAC_PI_4 / steps as f64;
    let mut lo = 0.0;
    let mut hi = FRAC_PI_4;
    for i in 1..=steps {
        let t = i as f64 * h;
        if expected_cost(t) >= 1.0 {
            lo = t - h;
            hi = t;
            break;
        }
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if expected_cost(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Folds an angle into `[0, π/4]` using `E(θ) = E(-θ) = E(θ + π/2) = E(π/2 - θ)`.
pub fn fold_angle(theta: f64) -> f64 {
    let t = theta.abs().rem_euclid(FRAC_PI_2);
    if t > FRAC_PI_4 {
        FRAC_PI_2 - t
    } else {
        t
    }
}

/// Iterative when it is strictly cheaper than one ebit; ties go to the Bell
/// route, which needs a single round.
pub fn strategy_advice(theta: f64) -> StrategyTag {
    if expected_cost(fold_angle(theta)) < 1.0 - 1e-12 {
        StrategyTag::Iterative
    } else {
        StrategyTag::BellDeterministic
    }
}

pub fn cost_profile(theta: f64) -> CostProfile {
    let per_round_cost = profile_terms(theta);
    CostProfile {
        theta,
        expected_cost: expected_cost(theta),
        per_round_cost,
        deterministic_cost: 1.0,
        preferred: strategy_advice(theta),
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Samples the iterative protocol on a two-qubit register. Trial `t` draws
/// from stream `t` of a ChaCha8 generator seeded with `seed`, so any subset of
/// trials can be rerun independently.
pub fn monte_carlo_cost(theta: f64, trials: usize, seed: u64) -> Result<MonteCarloCost> {
    if trials == 0 {
        return Err(Error::Scenario("trials must be at least 1".into()));
    }
    let data = StateVector::plus(2)?;
    let mut rounds = Vec::with_capacity(trials);
    let mut ebits = Vec::with_capacity(trials);
    let mut failures = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let (_, rec) = iterate_rotation(theta, 0b11, &data, &[], &mut rng, DEFAULT_MAX_ROUNDS)?;
        if !rec.succeeded {
            failures += 1;
        }
        rounds.push(rec.rounds.len() as f64);
        ebits.push(rec.total_ebits());
    }
    let (mean_rounds, stderr_rounds) = mean_and_stderr(&rounds);
    let (mean_ebits, stderr_ebits) = mean_and_stderr(&ebits);
    Ok(MonteCarloCost {
        trials,
        mean_rounds,
        stderr_rounds,
        mean_ebits,
        stderr_ebits,
        failures,
    })
}
