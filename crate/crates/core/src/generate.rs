//! Synthetic instance generation and stream partitioning.
//!
//! Factory production logs are not available, so instances are drawn from a
//! seeded generator with a skewed ensemble distribution: a few common
//! configurations and a long tail of rare ones. Long streams can then be cut
//! into equal chunks and filtered the same way a mined production log would be.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{CarWord, Coloring, EnsembleId, OrderSpec, ProblemInstance};
use crate::seed;

/// Exponent of the Zipf-like ensemble frequency law.
pub const ZIPF_EXPONENT: f64 = 1.0;

/// Minimum fraction of non-fixed cars for a partition to be kept.
pub const MIN_FREE_FRACTION: f64 = 0.7;

/// How black quotas are drawn for synthetic instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuotaPolicy {
    /// `k ~ Uniform{0..=#C}` per ensemble.
    #[default]
    UniformRandom,
    /// `k = floor(#C / 2)`.
    Balanced,
}

impl FromStr for QuotaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform-random" => Ok(QuotaPolicy::UniformRandom),
            "balanced" => Ok(QuotaPolicy::Balanced),
            other => Err(Error::input(format!(
                "unknown quota policy {other:?} (expected uniform or balanced)"
            ))),
        }
    }
}

impl fmt::Display for QuotaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotaPolicy::UniformRandom => "uniform",
            QuotaPolicy::Balanced => "balanced",
        })
    }
}

/// Draws a word of `n_cars` over `n_ensembles` configurations and a quota per
/// ensemble. Every ensemble occurs at least once; the remaining cars follow a
/// Zipf law over ensemble ids. Deterministic in `seed`.
pub fn generate_synthetic(
    n_cars: usize,
    n_ensembles: usize,
    policy: QuotaPolicy,
    seed: u64,
) -> Result<ProblemInstance> {
    if n_ensembles == 0 || n_ensembles > n_cars {
        return Err(Error::input(format!(
            "need 1 <= ensembles <= cars, got {n_ensembles} ensembles for {n_cars} cars"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n_ensembles)
        .map(|r| 1.0 / ((r + 1) as f64).powf(ZIPF_EXPONENT))
        .collect();
    let dist = WeightedIndex::new(&weights).expect("positive weights");

    let mut ids: Vec<u32> = (0..n_ensembles as u32).collect();
    ids.extend((n_ensembles..n_cars).map(|_| dist.sample(&mut rng) as u32));
    ids.shuffle(&mut rng);

    let mut counts = vec![0usize; n_ensembles];
    for &id in &ids {
        counts[id as usize] += 1;
    }
    let quotas: BTreeMap<EnsembleId, usize> = counts
        .iter()
        .enumerate()
        .map(|(e, &m)| {
            let k = match policy {
                QuotaPolicy::UniformRandom => rng.random_range(0..=m),
                QuotaPolicy::Balanced => m / 2,
            };
            (EnsembleId(e as u32), k)
        })
        .collect();

    ProblemInstance::new(
        format!("synthetic_n{n_cars}_m{n_ensembles}_{policy}_s{seed}"),
        CarWord::from_ids(ids),
        OrderSpec::new(quotas),
    )
}

/// Share of free (non-fixed) cars in a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionStats {
    pub total_cars: usize,
    pub non_fixed_cars: usize,
    pub accepted: bool,
}

impl PartitionStats {
    pub fn new(total_cars: usize, non_fixed_cars: usize) -> Self {
        debug_assert!(non_fixed_cars <= total_cars);
        // non_fixed / total >= 0.7, in integers
        let accepted = total_cars > 0 && 10 * non_fixed_cars >= 7 * total_cars;
        PartitionStats {
            total_cars,
            non_fixed_cars,
            accepted,
        }
    }

    pub fn of(instance: &ProblemInstance) -> Self {
        Self::new(instance.len(), instance.free_count())
    }
}

#[derive(Debug, Clone)]
pub struct Partition {
    pub instance: ProblemInstance,
    pub stats: PartitionStats,
}

/// Cuts a long production stream into `floor(N / chunk_size)` consecutive
/// chunks, dropping the remainder.
///
/// `production` is the recorded coloring of the stream; each chunk's quota
/// for an ensemble is the number of its cars painted black inside the chunk.
/// Ensemble ids are renumbered densely per chunk in ascending original order.
pub fn partition_stream(
    stream: &ProblemInstance,
    production: &Coloring,
    chunk_size: usize,
) -> Result<Vec<Partition>> {
    if chunk_size == 0 {
        return Err(Error::input("chunk size must be at least 1"));
    }
    stream.check_len(production)?;
    let word = stream.word().as_slice();
    let colors = production.as_slice();

    let chunks = word.chunks_exact(chunk_size).zip(colors.chunks_exact(chunk_size));
    chunks
        .enumerate()
        .map(|(index, (cars, paint))| {
            let mut remap = BTreeMap::new();
            for id in cars {
                remap.entry(*id).or_insert(0u32);
            }
            for (dense, slot) in remap.values_mut().enumerate() {
                *slot = dense as u32;
            }
            let mut quotas: BTreeMap<EnsembleId, usize> =
                remap.values().map(|&d| (EnsembleId(d), 0)).collect();
            for (id, color) in cars.iter().zip(paint) {
                if color.is_black() {
                    *quotas.get_mut(&EnsembleId(remap[id])).unwrap() += 1;
                }
            }
            let chunk_word = CarWord::from_ids(cars.iter().map(|id| remap[id]));
            let instance = ProblemInstance::new(
                format!("{}_p{index}", stream.name()),
                chunk_word,
                OrderSpec::new(quotas),
            )?;
            let stats = PartitionStats::of(&instance);
            Ok(Partition { instance, stats })
        })
        .collect()
}

/// Ensemble count of the reference family at size `n_cars`.
///
/// Roughly one configuration per three cars keeps ensembles small enough
/// that most of the queue is free while still producing multi-car cliques.
pub fn reference_ensembles(n_cars: usize) -> usize {
    (n_cars / 3).max(2).min(n_cars)
}

/// Attempts per requested instance before [`reference_suite`] gives up.
const MAX_ATTEMPTS_PER_INSTANCE: usize = 100_000;

/// The reference benchmark family: `count` synthetic instances of `n_cars`
/// cars (uniform-random quotas, [`reference_ensembles`] configurations), each
/// passing the 70% free-car filter. Candidate `j` uses seed
/// `seed::derive(seed::derive(master, n_cars), j)`; rejected candidates are skipped.
pub fn reference_suite(n_cars: usize, count: usize, master: u64) -> Result<Vec<ProblemInstance>> {
    filtered_suite(
        n_cars,
        reference_ensembles(n_cars),
        QuotaPolicy::UniformRandom,
        count,
        master,
    )
}

/// Like [`reference_suite`] with an explicit ensemble count and quota policy.
pub fn filtered_suite(
    n_cars: usize,
    n_ensembles: usize,
    policy: QuotaPolicy,
    count: usize,
    master: u64,
) -> Result<Vec<ProblemInstance>> {
    let family = seed::derive(master, n_cars as u64);
    let mut out = Vec::with_capacity(count);
    let mut candidate = 0u64;
    while out.len() < count {
        if candidate as usize > MAX_ATTEMPTS_PER_INSTANCE * count.max(1) {
            return Err(Error::input(format!(
                "could not find {count} instances with >= 70% free cars at N={n_cars}"
            )));
        }
        let inst = generate_synthetic(n_cars, n_ensembles, policy, seed::derive(family, candidate))?;
        candidate += 1;
        if PartitionStats::of(&inst).accepted {
            let index = out.len();
            out.push(inst.renamed(format!("ref_N{n_cars}_i{index:03}")));
        }
    }
    Ok(out)
}
