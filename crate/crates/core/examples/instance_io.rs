//! Builds an instance by hand, checks colorings against it and round-trips
//! it through the JSON file format.

use mcps::model::{Coloring, ProblemInstance};

fn main() -> mcps::Result<()> {
    let inst = ProblemInstance::from_parts("by-hand", &[0, 1, 0, 2, 1, 2], &[(0, 1), (1, 1), (2, 2)])?;
    println!("{} cars, {} free", inst.len(), inst.free_count());
    println!("forced: {:?}", inst.fixed_positions());

    for text in ["BBWBWB", "BWWBBB", "WWBBBB"] {
        let c: Coloring = text.parse()?;
        let report = inst.validate(&c)?;
        println!(
            "{text}: f = {}, valid = {}, deltas = {:?}",
            c.switches(),
            report.valid,
            report.deviations.iter().map(|d| (d.ensemble.0, d.delta())).collect::<Vec<_>>()
        );
    }

    let json = inst.to_json();
    print!("{json}");
    assert_eq!(ProblemInstance::from_json(&json)?, inst);
    Ok(())
}
