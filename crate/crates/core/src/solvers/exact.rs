//! Exhaustive oracle over valid colorings.
//!
//! Only colorings that meet every quota are visited: each free ensemble
//! contributes its `k`-subsets, combined depth-first across ensembles.

use crate::error::{Error, Result};
use crate::model::{Color, Coloring, EnsembleId, ProblemInstance};

/// Largest number of free cars the oracle accepts.
pub const EXACT_FREE_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    /// Minimum switch count.
    pub optimum: usize,
    /// Lexicographically smallest optimal coloring (`White < Black`).
    pub coloring: Coloring,
    /// Number of distinct optimal colorings.
    pub n_optima: u64,
    /// Number of valid colorings visited.
    pub visited: u64,
}

pub fn brute_force(instance: &ProblemInstance) -> Result<ExactSolution> {
    let free = instance.free_count();
    if free > EXACT_FREE_LIMIT {
        return Err(Error::Capacity {
            free,
            limit: EXACT_FREE_LIMIT,
        });
    }
    let mut coloring = Coloring::uniform(instance.len(), Color::White);
    for (pos, color) in instance.fixed_positions() {
        coloring.set(pos, color);
    }
    let free_ensembles: Vec<EnsembleId> = instance
        .ensembles()
        .filter(|&e| {
            let k = instance.quota(e);
            k != 0 && k != instance.multiplicity(e)
        })
        .collect();

    let mut search = Search {
        instance,
        ensembles: &free_ensembles,
        coloring,
        best: None,
    };
    search.ensemble(0);
    let best = search.best.expect("every instance has a valid coloring");
    Ok(ExactSolution {
        optimum: best.optimum,
        coloring: best.coloring,
        n_optima: best.count,
        visited: best.visited,
    })
}

struct Best {
    optimum: usize,
    coloring: Coloring,
    count: u64,
    visited: u64,
}

struct Search<'a> {
    instance: &'a ProblemInstance,
    ensembles: &'a [EnsembleId],
    coloring: Coloring,
    best: Option<Best>,
}

impl Search<'_> {
    fn ensemble(&mut self, depth: usize) {
        let Some(&e) = self.ensembles.get(depth) else {
            self.leaf();
            return;
        };
        let members = self.instance.members(e);
        let k = self.instance.quota(e);
        self.subset(depth, members, 0, k);
    }

    /// Chooses `k` black cars among `members[from..]`; the rest stay white.
    fn subset(&mut self, depth: usize, members: &[usize], from: usize, k: usize) {
        if k == 0 {
            self.ensemble(depth + 1);
            return;
        }
        for i in from..=members.len() - k {
            self.coloring.set(members[i], Color::Black);
            self.subset(depth, members, i + 1, k - 1);
            self.coloring.set(members[i], Color::White);
        }
    }

    fn leaf(&mut self) {
        let f = self.coloring.switches();
        match &mut self.best {
            None => {
                self.best = Some(Best {
                    optimum: f,
                    coloring: self.coloring.clone(),
                    count: 1,
                    visited: 1,
                })
            }
            Some(best) => {
                best.visited += 1;
                if f < best.optimum {
                    best.optimum = f;
                    best.coloring = self.coloring.clone();
                    best.count = 1;
                } else if f == best.optimum {
                    best.count += 1;
                    if self.coloring < best.coloring {
                        best.coloring = self.coloring.clone();
                    }
                }
            }
        }
    }
}
