//! Sequential Bernoulli simulation of a risk matrix, used as an independent check on the
//! closed-form composition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::RiskMatrix;

/// Trials per RNG stream. Chunk `j` draws from stream `j` of the seeded generator, so the
/// result does not depend on how chunks are scheduled across threads.
pub const TRIAL_CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Each trial walks the states in order and, at each state, tests every element; the first
/// failure ends the trial.
///
/// # Panics
/// When `trials == 0`.
pub fn monte_carlo_risk(matrix: &RiskMatrix, trials: u64, seed: u64) -> MonteCarloEstimate {
    assert!(trials >= 1, "monte carlo needs at least one trial");
    let probs: Vec<f64> = matrix.rows.iter().flatten().copied().filter(|&r| r > 0.0).collect();
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let failures: u64 = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let n = TRIAL_CHUNK.min(trials - j * TRIAL_CHUNK);
            run_chunk(&probs, n, seed, j)
        })
        .sum();
    let estimate = failures as f64 / trials as f64;
    MonteCarloEstimate {
        trials,
        failures,
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    }
}

fn run_chunk(probs: &[f64], trials: u64, seed: u64, stream: u64) -> u64 {
    if probs.is_empty() {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut failures = 0;
    for _ in 0..trials {
        if probs.iter().any(|&r| rng.gen::<f64>() < r) {
            failures += 1;
        }
    }
    failures
}
