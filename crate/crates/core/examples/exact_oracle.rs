//! Exhaustive search over the valid colorings of a three-configuration queue.

use mcps::model::ProblemInstance;
use mcps::solvers;

fn main() -> mcps::Result<()> {
    let inst = ProblemInstance::from_parts(
        "three",
        &[0, 1, 2, 0, 0, 1, 2, 2, 1, 0, 2, 1],
        &[(0, 3), (1, 2), (2, 3)],
    )?;
    let exact = solvers::brute_force(&inst)?;
    println!("queue     {:?}", inst.word().as_slice().iter().map(|e| e.0).collect::<Vec<_>>());
    println!("optimum   f = {}", exact.optimum);
    println!("coloring  {}", exact.coloring);
    println!("{} optimal of {} valid colorings", exact.n_optima, exact.visited);

    let greedy = solvers::greedy_black_first(&inst);
    println!("greedy    {greedy} (f = {})", inst.count_switches(&greedy)?);
    Ok(())
}
