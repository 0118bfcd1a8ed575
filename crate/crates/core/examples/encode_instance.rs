//! Encodes a small queue as an Ising model, conditions away forced cars and
//! converts the result to QUBO form.

use mcps::ising::{self, SpinVector};
use mcps::model::ProblemInstance;
use mcps::solvers;

fn main() -> mcps::Result<()> {
    // A A B B C with one black A, two black B, no black C
    let inst = ProblemInstance::from_parts("demo", &[0, 0, 1, 1, 2], &[(0, 1), (1, 2), (2, 0)])?;
    let model = ising::encode_default(&inst);
    println!("full model: {} variables, offset {}", model.n_vars(), model.offset());
    for (i, h) in model.linear_terms() {
        println!("  h[{i}] = {h}");
    }
    for ((i, j), v) in model.quadratic_terms() {
        println!("  J[{i},{j}] = {v}");
    }
    println!("precision ratio {:.4}", model.precision_ratio()?);

    let reduced = model.condition(&ising::forced_spins(&inst))?;
    println!(
        "conditioned: {} free variables at positions {:?}",
        reduced.n_vars(),
        reduced.var_to_position()
    );

    let best = solvers::greedy_black_first(&inst);
    let e = model.energy(&SpinVector::from_coloring(&best))?;
    println!("greedy {best}: f = {}, energy {e}", inst.count_switches(&best)?);

    let qubo = model.to_qubo();
    let x: Vec<bool> = best.iter().map(|c| c.is_black()).collect();
    println!("same state as QUBO: {}", qubo.energy(&x)?);
    print!("{}", reduced.to_json());
    Ok(())
}
