//! Single-flip tabu search with aspiration and random restarts.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};

/// Upper bound of the default tenure.
pub const MAX_DEFAULT_TENURE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabuParams {
    /// Wall-clock budget of the whole search.
    pub timeout: Duration,
    /// Iterations a flipped variable stays tabu; `None` picks `ceil(n/10)`, at most 20.
    pub tenure: Option<usize>,
    /// Non-improving moves before a restart; `None` uses `10 n` (at least 100).
    pub stall_limit: Option<usize>,
    /// Optional cap on restarts, for runs that must end before the timeout.
    pub max_restarts: Option<usize>,
}

impl TabuParams {
    pub fn new(timeout: Duration) -> Result<Self> {
        if timeout.is_zero() {
            return Err(Error::input("tabu timeout must be positive"));
        }
        Ok(TabuParams {
            timeout,
            tenure: None,
            stall_limit: None,
            max_restarts: None,
        })
    }

    /// `floor(N / 3)` seconds, but never less than one second.
    pub fn for_cars(n_cars: usize) -> Self {
        TabuParams {
            timeout: Duration::from_secs((n_cars as u64 / 3).max(1)),
            tenure: None,
            stall_limit: None,
            max_restarts: None,
        }
    }

    pub fn with_tenure(mut self, tenure: usize) -> Result<Self> {
        if tenure == 0 {
            return Err(Error::input("tabu tenure must be at least 1"));
        }
        self.tenure = Some(tenure);
        Ok(self)
    }

    pub fn tenure_for(&self, n_vars: usize) -> usize {
        self.tenure
            .unwrap_or_else(|| n_vars.div_ceil(10).clamp(1, MAX_DEFAULT_TENURE))
    }

    fn stall_for(&self, n_vars: usize) -> usize {
        self.stall_limit.unwrap_or((10 * n_vars).max(100))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabuOutcome {
    pub spins: SpinVector,
    pub energy: f64,
    /// Energy of the first random start.
    pub initial_energy: f64,
    pub iterations: u64,
    pub restarts: usize,
}

/// Best-improvement single-flip search. A tabu variable may only be flipped
/// when that yields a new global best; when every move is tabu the least bad
/// one is taken anyway. The search restarts from a random state after
/// `stall_limit` moves without a new best and stops at the timeout.
pub fn tabu_search(model: &IsingModel, params: &TabuParams, seed: u64) -> TabuOutcome {
    let adj = model.adjacency();
    let n = adj.n_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();

    let random_state = |rng: &mut ChaCha8Rng| -> Vec<i8> {
        (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
    };

    let mut spins = random_state(&mut rng);
    let mut energy = adj.energy(&spins);
    let initial_energy = energy;
    let mut best = spins.clone();
    let mut best_energy = energy;
    if n == 0 {
        return TabuOutcome {
            spins: SpinVector::from_raw(best),
            energy: best_energy,
            initial_energy,
            iterations: 0,
            restarts: 0,
        };
    }

    let tenure = params.tenure_for(n) as u64;
    let stall_limit = params.stall_for(n);
    let mut field = adj.local_fields(&spins);
    let mut tabu_until = vec![0u64; n];
    let mut iterations = 0u64;
    let mut restarts = 0usize;
    let mut stall = 0usize;

    while start.elapsed() < params.timeout {
        iterations += 1;
        let mut chosen: Option<(usize, f64)> = None;
        let mut fallback: Option<(usize, f64)> = None;
        let mut ties = 0u32;
        for i in 0..n {
            let delta = -2.0 * f64::from(spins[i]) * field[i];
            let allowed = tabu_until[i] < iterations || energy + delta < best_energy;
            if allowed {
                match chosen {
                    Some((_, d)) if delta > d => {}
                    Some((_, d)) if delta == d => {
                        // uniform choice among equally good moves
                        ties += 1;
                        if rng.random_range(0..=ties) == 0 {
                            chosen = Some((i, delta));
                        }
                    }
                    _ => {
                        ties = 0;
                        chosen = Some((i, delta));
                    }
                }
            } else if fallback.is_none_or(|(_, d)| delta < d) {
                fallback = Some((i, delta));
            }
        }
        let (i, delta) = chosen.or(fallback).expect("at least one variable");

        let s = f64::from(spins[i]);
        spins[i] = -spins[i];
        energy += delta;
        for (j, w) in adj.row(i) {
            field[j] -= 2.0 * s * w;
        }
        tabu_until[i] = iterations + tenure;

        if energy < best_energy {
            best_energy = energy;
            best.copy_from_slice(&spins);
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= stall_limit {
            if params.max_restarts.is_some_and(|cap| restarts >= cap) {
                break;
            }
            restarts += 1;
            stall = 0;
            spins = random_state(&mut rng);
            energy = adj.energy(&spins);
            field = adj.local_fields(&spins);
            tabu_until.iter_mut().for_each(|t| *t = 0);
            if energy < best_energy {
                best_energy = energy;
                best.copy_from_slice(&spins);
            }
        }
    }

    // recompute to drop accumulated rounding for non-integer models
    let best_energy = adj.energy(&best);
    TabuOutcome {
        spins: SpinVector::from_raw(best),
        energy: best_energy,
        initial_energy,
        iterations,
        restarts,
    }
}
