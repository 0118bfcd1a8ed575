//! Simulated annealing over Ising spins.
//!
//! Each sample starts from a uniformly random state and performs `n_sweeps`
//! sequential sweeps; sweep `t` runs at inverse temperature `beta_t`, a
//! geometric interpolation from `beta_min` to `beta_max`. Every variable is
//! visited once per sweep and flipped with Metropolis probability
//! `min(1, exp(-beta_t * dE))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ising::{Adjacency, IsingModel, SpinVector};

/// Default inverse-temperature range.
pub const BETA_MIN: f64 = 0.01;
pub const BETA_MAX: f64 = 10.0;
/// Default sweeps and samples per car.
pub const SWEEPS_PER_CAR: usize = 10;
pub const SAMPLES_PER_CAR: usize = 20;

// exp(-40) is below the resolution of a uniform f64 draw
const MAX_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaParams {
    pub n_sweeps: usize,
    pub n_samples: usize,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl SaParams {
    pub fn new(n_sweeps: usize, n_samples: usize, beta_min: f64, beta_max: f64) -> Result<Self> {
        if n_sweeps == 0 || n_samples == 0 {
            return Err(Error::input("annealing needs at least one sweep and one sample"));
        }
        if !(beta_min > 0.0 && beta_min < beta_max && beta_max.is_finite()) {
            return Err(Error::input(format!(
                "need 0 < beta_min < beta_max, got [{beta_min}, {beta_max}]"
            )));
        }
        Ok(SaParams {
            n_sweeps,
            n_samples,
            beta_min,
            beta_max,
        })
    }

    /// `10 N` sweeps, `20 N` samples, `beta` from 0.01 to 10.
    pub fn for_cars(n_cars: usize) -> Self {
        let n = n_cars.max(1);
        SaParams {
            n_sweeps: SWEEPS_PER_CAR * n,
            n_samples: SAMPLES_PER_CAR * n,
            beta_min: BETA_MIN,
            beta_max: BETA_MAX,
        }
    }

    /// Inverse temperature of every sweep.
    pub fn schedule(&self) -> Vec<f64> {
        if self.n_sweeps == 1 {
            return vec![self.beta_min];
        }
        let ratio = (self.beta_max / self.beta_min).ln();
        let last = (self.n_sweeps - 1) as f64;
        (0..self.n_sweeps)
            .map(|t| self.beta_min * (ratio * t as f64 / last).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub spins: SpinVector,
    pub energy: f64,
    /// Index of the sample, which selects its random stream.
    pub index: usize,
}

/// Runs `n_samples` independent anneals and returns them sorted by energy
/// (ties by sample index). Sample `i` draws from the ChaCha8 stream `i` of
/// `seed`, so the output does not depend on the thread pool.
pub fn simulated_annealing(model: &IsingModel, params: &SaParams, seed: u64) -> Vec<Sample> {
    let adjacency = model.adjacency();
    let schedule = params.schedule();
    let mut samples: Vec<Sample> = (0..params.n_samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let spins = anneal_one(&adjacency, &schedule, &mut rng);
            let energy = adjacency.energy(&spins);
            Sample {
                spins: SpinVector::from_raw(spins),
                energy,
                index,
            }
        })
        .collect();
    samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.index.cmp(&b.index)));
    samples
}

fn anneal_one<R: Rng>(adj: &Adjacency, schedule: &[f64], rng: &mut R) -> Vec<i8> {
    let n = adj.n_vars();
    let mut spins: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let mut field = adj.local_fields(&spins);
    for &beta in schedule {
        let cutoff = MAX_EXPONENT / beta;
        for i in 0..n {
            let s = f64::from(spins[i]);
            let delta = -2.0 * s * field[i];
            let accept = delta <= 0.0 || (delta < cutoff && rng.random::<f64>() < (-beta * delta).exp());
            if accept {
                spins[i] = -spins[i];
                let push = -2.0 * s;
                for (j, w) in adj.row(i) {
                    field[j] += push * w;
                }
            }
        }
    }
    spins
}
