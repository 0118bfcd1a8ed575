//! Repairs arbitrary colorings into valid ones with as few extra switches as
//! each single flip allows.

use mcps::model::{Coloring, ProblemInstance};
use mcps::solvers;

fn main() -> mcps::Result<()> {
    let inst = ProblemInstance::from_parts("four", &[0, 0, 0, 0, 1, 1], &[(0, 2), (1, 1)])?;
    for text in ["BBBBBB", "WWWWWW", "BWBWBW", "WWBBBW"] {
        let c: Coloring = text.parse()?;
        let (fixed, changed) = solvers::repair(&inst, &c)?;
        println!(
            "{text} (f={}) -> {fixed} (f={}){}",
            c.switches(),
            fixed.switches(),
            if changed { "" } else { " unchanged" }
        );
    }
    Ok(())
}
