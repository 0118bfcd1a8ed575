//! The solver suite and the uniform solve pipeline.
//!
//! Spin-based solvers (annealing, tabu) run on the encoded model after the
//! forced cars have been conditioned away; their output is decoded, repaired
//! to meet the quotas, and scored. Constructive solvers skip the encoding.

mod anneal;
mod exact;
mod heuristics;
mod repair;
mod tabu;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use anneal::{
    simulated_annealing, SaParams, Sample, BETA_MAX, BETA_MIN, SAMPLES_PER_CAR, SWEEPS_PER_CAR,
};
pub use exact::{brute_force, ExactSolution, EXACT_FREE_LIMIT};
pub use heuristics::{greedy_black_first, random_valid};
pub use repair::repair;
pub use tabu::{tabu_search, TabuOutcome, TabuParams, MAX_DEFAULT_TENURE};

use crate::error::{Error, Result};
use crate::ising::{self, IsingModel, SpinVector};
use crate::model::{Color, Coloring, ProblemInstance};

/// Solver families by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Random,
    Greedy,
    Sa,
    Tabu,
    Exact,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Random,
        SolverKind::Greedy,
        SolverKind::Sa,
        SolverKind::Tabu,
        SolverKind::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Random => "random",
            SolverKind::Greedy => "greedy",
            SolverKind::Sa => "sa",
            SolverKind::Tabu => "tabu",
            SolverKind::Exact => "exact",
        }
    }

    /// Whether results depend on wall-clock time rather than only on the seed.
    pub fn timeout_bound(self) -> bool {
        self == SolverKind::Tabu
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown solver {s:?} (expected random, greedy, sa, tabu or exact)"
                ))
            })
    }
}

/// A fully parameterized solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Solver {
    /// One uniformly random valid coloring.
    Random,
    Greedy,
    Sa(SaParams),
    Tabu(TabuParams),
    Exact,
}

impl Solver {
    pub fn kind(&self) -> SolverKind {
        match self {
            Solver::Random => SolverKind::Random,
            Solver::Greedy => SolverKind::Greedy,
            Solver::Sa(_) => SolverKind::Sa,
            Solver::Tabu(_) => SolverKind::Tabu,
            Solver::Exact => SolverKind::Exact,
        }
    }
}

/// Optional overrides of the size-dependent defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaOverrides {
    pub sweeps: Option<usize>,
    pub samples: Option<usize>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabuOverrides {
    pub timeout_s: Option<f64>,
    pub tenure: Option<usize>,
}

/// A solver choice whose parameters are resolved per instance size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub sa: SaOverrides,
    pub tabu: TabuOverrides,
}

impl SolverSpec {
    pub fn new(kind: SolverKind) -> Self {
        SolverSpec {
            kind,
            sa: SaOverrides::default(),
            tabu: TabuOverrides::default(),
        }
    }

    /// Parses a comma separated list such as `random,greedy,sa`.
    pub fn parse_list(list: &str) -> Result<Vec<SolverSpec>> {
        list.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse().map(SolverSpec::new))
            .collect()
    }

    /// Parameters for an instance of `n_cars` cars.
    pub fn resolve(&self, n_cars: usize) -> Result<Solver> {
        Ok(match self.kind {
            SolverKind::Random => Solver::Random,
            SolverKind::Greedy => Solver::Greedy,
            SolverKind::Exact => Solver::Exact,
            SolverKind::Sa => {
                let d = SaParams::for_cars(n_cars);
                Solver::Sa(SaParams::new(
                    self.sa.sweeps.unwrap_or(d.n_sweeps),
                    self.sa.samples.unwrap_or(d.n_samples),
                    self.sa.beta_min.unwrap_or(d.beta_min),
                    self.sa.beta_max.unwrap_or(d.beta_max),
                )?)
            }
            SolverKind::Tabu => {
                let mut p = TabuParams::for_cars(n_cars);
                if let Some(secs) = self.tabu.timeout_s {
                    if !(secs.is_finite() && secs > 0.0) {
                        return Err(Error::input(format!("tabu timeout must be positive, got {secs}")));
                    }
                    p.timeout = Duration::from_secs_f64(secs);
                }
                if let Some(t) = self.tabu.tenure {
                    p = p.with_tenure(t)?;
                }
                Solver::Tabu(p)
            }
        })
    }
}

/// Outcome of one solver run on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Final coloring, always valid.
    pub coloring: Coloring,
    /// Switch count of `coloring`.
    pub switches: usize,
    /// Energy of `coloring` under the encoded model with `lambda = N`.
    pub energy: f64,
    pub valid: bool,
    /// Whether the solver produced at least one valid coloring before repair.
    pub valid_raw: bool,
    /// Whether the reported coloring needed repair.
    pub repaired: bool,
    /// For samplers: fraction of samples that were valid before repair.
    pub sample_valid_fraction: Option<f64>,
    pub wall_time: Duration,
    pub solver: SolverKind,
    pub seed: Option<u64>,
}

/// Places reduced-model spins back onto a full-length coloring.
pub fn expand_spins(
    reduced: &IsingModel,
    spins: &SpinVector,
    fixed: &BTreeMap<usize, Color>,
    n_cars: usize,
) -> Coloring {
    let mut coloring = Coloring::uniform(n_cars, Color::White);
    for (&pos, &color) in fixed {
        coloring.set(pos, color);
    }
    for (&pos, &s) in reduced.var_to_position().iter().zip(spins.as_slice()) {
        coloring.set(pos, ising::spin_to_color(s));
    }
    coloring
}

struct Candidate {
    coloring: Coloring,
    was_valid: bool,
}

/// Runs `solver` on `instance` through encode, condition, search, decode,
/// repair and scoring.
pub fn solve(instance: &ProblemInstance, solver: &Solver, seed: u64) -> Result<SolveResult> {
    let start = Instant::now();
    let mut sample_valid_fraction = None;
    let (chosen, any_valid) = match solver {
        Solver::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_valid(instance, &mut rng);
            (Candidate { coloring: c, was_valid: true }, true)
        }
        Solver::Greedy => {
            let c = greedy_black_first(instance);
            (Candidate { coloring: c, was_valid: true }, true)
        }
        Solver::Exact => {
            let c = brute_force(instance)?.coloring;
            (Candidate { coloring: c, was_valid: true }, true)
        }
        Solver::Sa(params) => {
            let fixed = instance.fixed_positions();
            let reduced = reduced_model(instance, &fixed)?;
            let samples = simulated_annealing(&reduced, params, seed);
            let decoded: Vec<Coloring> = samples
                .iter()
                .map(|s| expand_spins(&reduced, &s.spins, &fixed, instance.len()))
                .collect();
            let valid_count = decoded.iter().filter(|c| instance.is_valid(c)).count();
            sample_valid_fraction = Some(valid_count as f64 / decoded.len() as f64);
            best_repaired(instance, decoded)?
        }
        Solver::Tabu(params) => {
            let fixed = instance.fixed_positions();
            let reduced = reduced_model(instance, &fixed)?;
            let outcome = tabu_search(&reduced, params, seed);
            let decoded = expand_spins(&reduced, &outcome.spins, &fixed, instance.len());
            best_repaired(instance, vec![decoded])?
        }
    };

    let repaired = !chosen.was_valid;
    let coloring = chosen.coloring;
    let wall_time = start.elapsed();
    let model = ising::encode_default(instance);
    let energy = model.energy(&SpinVector::from_coloring(&coloring))?;
    let report = instance.validate(&coloring)?;
    Ok(SolveResult {
        switches: coloring.switches(),
        valid: report.valid,
        valid_raw: any_valid,
        repaired,
        energy,
        coloring,
        sample_valid_fraction,
        wall_time,
        solver: solver.kind(),
        seed: match solver {
            Solver::Greedy | Solver::Exact => None,
            _ => Some(seed),
        },
    })
}

fn reduced_model(
    instance: &ProblemInstance,
    fixed: &BTreeMap<usize, Color>,
) -> Result<IsingModel> {
    let forced = fixed
        .iter()
        .map(|(&p, &c)| (p, ising::color_to_spin(c)))
        .collect();
    ising::encode_default(instance).condition(&forced)
}

/// Repairs every decoded sample and keeps the one with the fewest switches;
/// ties keep the earliest (lowest-energy) sample.
fn best_repaired(instance: &ProblemInstance, decoded: Vec<Coloring>) -> Result<(Candidate, bool)> {
    let mut best: Option<(usize, Candidate)> = None;
    let mut any_valid = false;
    for raw in decoded {
        let (fixed, changed) = repair(instance, &raw)?;
        any_valid |= !changed;
        let f = fixed.switches();
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((
                f,
                Candidate {
                    coloring: fixed,
                    was_valid: !changed,
                },
            ));
        }
    }
    let (_, candidate) = best.ok_or_else(|| Error::input("solver returned no samples"))?;
    Ok((candidate, any_valid))
}
