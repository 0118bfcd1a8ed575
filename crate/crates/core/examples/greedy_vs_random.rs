//! Compares the greedy heuristic with the random-coloring baseline as the
//! queue grows.

use mcps::benchmark;
use mcps::generate;
use mcps::solvers;

fn main() -> mcps::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>12}", "cars", "greedy", "random", "improvement");
    for n in [10, 30, 100, 300] {
        let suite = generate::reference_suite(n, 20, 0)?;
        let mut greedy = Vec::new();
        let mut random = Vec::new();
        for (i, inst) in suite.iter().enumerate() {
            greedy.push(inst.count_switches(&solvers::greedy_black_first(inst))? as f64);
            random.push(benchmark::estimate_baseline(inst, i as u64).mean_switches);
        }
        let g = benchmark::median(&greedy).unwrap_or(f64::NAN);
        let r = benchmark::median(&random).unwrap_or(f64::NAN);
        println!("{n:>6} {g:>10.1} {r:>10.2} {:>12.2}", r - g);
    }
    Ok(())
}
