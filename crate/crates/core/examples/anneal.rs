//! Simulated annealing on a synthetic 30-car instance.
//!
//! `cargo run --release --example anneal -- [cars] [seed]`

use std::env;

use mcps::generate::{self, QuotaPolicy};
use mcps::solvers::{self, SaParams, Solver};

fn main() -> mcps::Result<()> {
    let args: Vec<u64> = env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(30) as usize;
    let seed = args.get(1).copied().unwrap_or(0);
    let inst = generate::generate_synthetic(
        n,
        generate::reference_ensembles(n),
        QuotaPolicy::UniformRandom,
        seed,
    )?;

    let params = SaParams::for_cars(n);
    println!(
        "{n} cars, {} free; {} sweeps x {} samples, beta {}..{}",
        inst.free_count(),
        params.n_sweeps,
        params.n_samples,
        params.beta_min,
        params.beta_max
    );
    let r = solvers::solve(&inst, &Solver::Sa(params), seed)?;
    println!("best f = {} ({})", r.switches, r.coloring);
    println!(
        "valid before repair: {}, repaired: {}, valid sample fraction {:.3}",
        r.valid_raw,
        r.repaired,
        r.sample_valid_fraction.unwrap_or(0.0)
    );
    let greedy = solvers::greedy_black_first(&inst);
    println!("greedy f = {}", inst.count_switches(&greedy)?);
    Ok(())
}
