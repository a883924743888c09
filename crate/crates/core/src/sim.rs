//! Monte Carlo oracle that plays the draw process round by round.
//!
//! Every round each competitor independently draws a 1 with probability equal
//! to its winning percentage. A round with exactly one 1 crowns that
//! competitor; any other round is replayed. Nothing here uses the closed-form
//! probabilities, so the estimates can validate them.
//!
//! Trials are split into fixed-size batches. Batch `i` draws from a ChaCha8
//! stream seeded with `(seed, i)`, so results are identical no matter how many
//! threads run the batches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::error::UndefinedReason;
use crate::model::{Contest, ContestClass, Probability, WinPct};

pub const DEFAULT_MAX_ROUNDS: u64 = 10_000;

/// Trials per independently seeded batch.
pub const BATCH_SIZE: u64 = 1 << 14;

/// Below this round-resolution probability the abandonment bound is skipped.
const MIN_RESOLUTION_FOR_BOUND: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SimError {
    #[error("probability is undefined: {0}")]
    Undefined(UndefinedReason),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
    #[error("all {trials} trials hit the round limit without a winner")]
    AllTrialsAbandoned { trials: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    pub max_rounds_per_trial: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self, SimError> {
        SimConfig::with_max_rounds(trials, DEFAULT_MAX_ROUNDS, seed)
    }

    pub fn with_max_rounds(trials: u64, max_rounds: u64, seed: u64) -> Result<Self, SimError> {
        if trials == 0 {
            return Err(SimError::InvalidConfig("trials must be at least 1"));
        }
        if max_rounds == 0 {
            return Err(SimError::InvalidConfig("max rounds must be at least 1"));
        }
        Ok(SimConfig {
            trials,
            max_rounds_per_trial: max_rounds,
            seed,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundOutcome {
    /// Index of the sole competitor that drew a 1; 0 is the protagonist.
    Winner(usize),
    NoWinner,
}

/// Plays one round of independent draws.
pub fn simulate_round<R: Rng + ?Sized>(
    rng: &mut R,
    protagonist: WinPct,
    opponents: &[WinPct],
) -> RoundOutcome {
    let mut winner = None;
    let mut successes = 0usize;
    for (i, s) in std::iter::once(protagonist)
        .chain(opponents.iter().copied())
        .enumerate()
    {
        if rng.random::<f64>() < s.value() {
            successes += 1;
            winner = Some(i);
        }
    }
    match (successes, winner) {
        (1, Some(i)) => RoundOutcome::Winner(i),
        _ => RoundOutcome::NoWinner,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub win_probability_estimate: Probability,
    pub standard_error: f64,
    pub trials_completed: u64,
    pub trials_abandoned: u64,
    /// Wins per competitor, protagonist first.
    pub per_competitor_wins: Vec<u64>,
}

impl SimResult {
    /// Empirical win frequency of competitor `index` among resolved trials.
    pub fn frequency(&self, index: usize) -> f64 {
        self.per_competitor_wins[index] as f64 / self.trials_completed as f64
    }

    /// Binomial standard error of [`SimResult::frequency`].
    pub fn frequency_standard_error(&self, index: usize) -> f64 {
        let p = self.frequency(index);
        (p * (1.0 - p) / self.trials_completed as f64).sqrt()
    }

    pub fn abandonment_fraction(&self) -> f64 {
        self.trials_abandoned as f64 / (self.trials_completed + self.trials_abandoned) as f64
    }
}

/// Probability that a single round produces a winner.
pub fn resolution_probability(c: &Contest) -> f64 {
    let all: Vec<f64> = c.competitors().map(|s| s.value()).collect();
    (0..all.len())
        .map(|i| {
            all.iter()
                .enumerate()
                .map(|(j, &s)| if i == j { s } else { 1.0 - s })
                .product::<f64>()
        })
        .sum()
}

/// Upper bound `10 (1 - M)^max_rounds` on the abandoned fraction, or `None`
/// when rounds resolve too rarely (`M < 1e-6`) for the bound to be useful.
pub fn abandonment_bound(c: &Contest, max_rounds: u64) -> Option<f64> {
    let m = resolution_probability(c);
    if m < MIN_RESOLUTION_FOR_BOUND {
        return None;
    }
    let rounds = max_rounds.min(i32::MAX as u64) as i32;
    Some(10.0 * (1.0 - m).powi(rounds))
}

#[derive(Default)]
struct Tally {
    wins: Vec<u64>,
    abandoned: u64,
}

fn run_batch(c: &Contest, cfg: &SimConfig, batch: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(batch);
    let start = batch * BATCH_SIZE;
    let count = BATCH_SIZE.min(cfg.trials - start);
    let mut tally = Tally {
        wins: vec![0; c.n() + 1],
        abandoned: 0,
    };
    for _ in 0..count {
        let mut resolved = false;
        for _ in 0..cfg.max_rounds_per_trial {
            if let RoundOutcome::Winner(i) =
                simulate_round(&mut rng, c.protagonist(), c.opponents())
            {
                tally.wins[i] += 1;
                resolved = true;
                break;
            }
        }
        if !resolved {
            tally.abandoned += 1;
        }
    }
    tally
}

/// Estimates the protagonist's win probability by playing `cfg.trials`
/// contests to completion.
///
/// Trials that reach `max_rounds_per_trial` without a winner are counted as
/// abandoned and left out of every frequency.
pub fn estimate_p_n(c: &Contest, cfg: &SimConfig) -> Result<SimResult, SimError> {
    if let ContestClass::Undefined(reason) = c.classify() {
        return Err(SimError::Undefined(reason));
    }
    let batches = cfg.trials.div_ceil(BATCH_SIZE);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| run_batch(c, cfg, b))
        .collect();

    let mut wins = vec![0u64; c.n() + 1];
    let mut abandoned = 0;
    for t in tallies {
        for (w, x) in wins.iter_mut().zip(t.wins) {
            *w += x;
        }
        abandoned += t.abandoned;
    }
    let completed = cfg.trials - abandoned;
    if completed == 0 {
        return Err(SimError::AllTrialsAbandoned { trials: cfg.trials });
    }
    let estimate = wins[0] as f64 / completed as f64;
    Ok(SimResult {
        win_probability_estimate: Probability::new(estimate).expect("a frequency"),
        standard_error: (estimate * (1.0 - estimate) / completed as f64).sqrt(),
        trials_completed: completed,
        trials_abandoned: abandoned,
        per_competitor_wins: wins,
    })
}
