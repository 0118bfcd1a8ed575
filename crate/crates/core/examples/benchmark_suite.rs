//! Runs the reference suite and prints the median table.
//!
//! `cargo run --release --example benchmark_suite -- [count] [sizes...] [--solvers LIST]`
//!
//! Defaults: 10 instances at N = 10 and 30, solvers random,greedy,sa.

use std::env;
use std::time::Instant;

use mcps::benchmark::{self, SuiteOptions};
use mcps::generate;
use mcps::solvers::SolverSpec;

fn main() -> mcps::Result<()> {
    let mut args: Vec<String> = env::args().skip(1).collect();
    let mut solvers = "random,greedy,sa".to_string();
    if let Some(i) = args.iter().position(|a| a == "--solvers") {
        solvers = args.get(i + 1).cloned().unwrap_or(solvers);
        args.drain(i..(i + 2).min(args.len()));
    }
    let count: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(10);
    let mut sizes: Vec<usize> = args.iter().skip(1).filter_map(|a| a.parse().ok()).collect();
    if sizes.is_empty() {
        sizes = vec![10, 30];
    }

    let specs = SolverSpec::parse_list(&solvers)?;
    let mut instances = Vec::new();
    for &n in &sizes {
        instances.extend(generate::reference_suite(n, count, 0)?);
    }
    let start = Instant::now();
    let records = benchmark::run_suite(&instances, &specs, &SuiteOptions::default())?;
    let rows = benchmark::aggregate(&records)?;
    print!("{}", benchmark::format_table(&rows));
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
