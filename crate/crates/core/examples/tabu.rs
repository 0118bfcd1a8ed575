//! Tabu search with a short wall-clock budget.
//!
//! `cargo run --release --example tabu -- [cars] [millis]`

use std::env;
use std::time::Duration;

use mcps::generate::{self, QuotaPolicy};
use mcps::ising;
use mcps::solvers::{self, Solver, TabuParams};

fn main() -> mcps::Result<()> {
    let args: Vec<u64> = env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(60) as usize;
    let millis = args.get(1).copied().unwrap_or(500);
    let inst = generate::generate_synthetic(
        n,
        generate::reference_ensembles(n),
        QuotaPolicy::UniformRandom,
        1,
    )?;
    let params = TabuParams::new(Duration::from_millis(millis))?;

    // the raw search on the conditioned model
    let model = ising::encode_default(&inst).condition(&ising::forced_spins(&inst))?;
    let outcome = solvers::tabu_search(&model, &params, 7);
    println!(
        "{} vars: energy {} -> {} in {} moves, {} restarts",
        model.n_vars(),
        outcome.initial_energy,
        outcome.energy,
        outcome.iterations,
        outcome.restarts
    );

    let r = solvers::solve(&inst, &Solver::Tabu(params), 7)?;
    println!("f = {}, repaired: {}", r.switches, r.repaired);
    Ok(())
}
