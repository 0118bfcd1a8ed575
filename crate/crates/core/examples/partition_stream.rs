//! Cuts a long production stream into fixed-size chunks and filters them by
//! their share of free cars.

use mcps::generate::{self, QuotaPolicy};
use mcps::solvers;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mcps::Result<()> {
    let stream = generate::generate_synthetic(10_000, 400, QuotaPolicy::UniformRandom, 3)?;
    let production = solvers::random_valid(&stream, &mut ChaCha8Rng::seed_from_u64(3));
    for chunk in [100, 1000, 3000] {
        let parts = generate::partition_stream(&stream, &production, chunk)?;
        let accepted: Vec<_> = parts.iter().filter(|p| p.stats.accepted).collect();
        println!(
            "chunk {chunk:5}: {:3} partitions, {:3} accepted",
            parts.len(),
            accepted.len()
        );
        if let Some(p) = accepted.first() {
            let greedy = solvers::greedy_black_first(&p.instance);
            println!(
                "  {}: {} of {} cars free, {} ensembles, greedy f = {}",
                p.instance.name(),
                p.stats.non_fixed_cars,
                p.stats.total_cars,
                p.instance.n_ensembles(),
                p.instance.count_switches(&greedy)?
            );
        }
    }
    Ok(())
}
