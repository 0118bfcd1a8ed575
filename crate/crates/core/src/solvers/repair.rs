//! Greedy post-processing that restores the black quotas.

use crate::error::Result;
use crate::model::{Color, Coloring, ProblemInstance};

/// Change in switch count if the car at `pos` is flipped.
fn flip_cost(colors: &Coloring, pos: usize) -> i64 {
    let here = colors.get(pos);
    let mut delta = 0;
    let neighbors = [pos.checked_sub(1), Some(pos + 1).filter(|&p| p < colors.len())];
    for p in neighbors.into_iter().flatten() {
        // an equal neighbour becomes a switch, a differing one stops being one
        delta += if colors.get(p) == here { 1 } else { -1 };
    }
    delta
}

/// Flips surplus (or missing) black cars one at a time, ensemble by
/// ensemble in id order, each time choosing the flip that increases the
/// switch count least; ties go to the leftmost car. Returns the repaired
/// coloring and whether anything changed.
pub fn repair(instance: &ProblemInstance, coloring: &Coloring) -> Result<(Coloring, bool)> {
    let report = instance.validate(coloring)?;
    if report.valid {
        return Ok((coloring.clone(), false));
    }
    let mut out = coloring.clone();
    for dev in &report.deviations {
        let delta = dev.delta();
        if delta == 0 {
            continue;
        }
        let from = if delta > 0 { Color::Black } else { Color::White };
        let members = instance.members(dev.ensemble);
        for _ in 0..delta.unsigned_abs() {
            let pos = members
                .iter()
                .copied()
                .filter(|&p| out.get(p) == from)
                .min_by_key(|&p| flip_cost(&out, p))
                .expect("an ensemble off quota has a car to flip");
            out.set(pos, from.flipped());
        }
    }
    debug_assert!(instance.is_valid(&out));
    Ok((out, true))
}
