//! Constructive solvers that are valid by construction.

use rand::seq::index;
use rand::Rng;

use crate::model::{Color, Coloring, ProblemInstance};

/// Paints a uniformly random `k`-subset of every ensemble black.
pub fn random_valid<R: Rng + ?Sized>(instance: &ProblemInstance, rng: &mut R) -> Coloring {
    let mut coloring = Coloring::uniform(instance.len(), Color::White);
    for e in instance.ensembles() {
        let members = instance.members(e);
        for pick in index::sample(rng, members.len(), instance.quota(e)) {
            coloring.set(members[pick], Color::Black);
        }
    }
    coloring
}

/// Black-first: scanning left to right, paint a car black while its
/// ensemble still owes black cars, white otherwise.
pub fn greedy_black_first(instance: &ProblemInstance) -> Coloring {
    let mut remaining: Vec<usize> = instance.ensembles().map(|e| instance.quota(e)).collect();
    let colors = instance
        .word()
        .as_slice()
        .iter()
        .map(|e| {
            let left = &mut remaining[e.index()];
            if *left > 0 {
                *left -= 1;
                Color::Black
            } else {
                Color::White
            }
        })
        .collect();
    Coloring::new(colors)
}
