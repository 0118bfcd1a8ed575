//! Multi-car paint shop optimization.
//!
//! A fixed queue of cars must receive a black or white filler coat so that
//! every car ensemble gets its ordered number of black cars, while the number
//! of color switches along the queue is minimized. This crate provides:
//!
//! * [`model`]: instances, colorings, the switch objective and quota checks;
//! * [`generate`]: seeded synthetic instances and stream partitioning;
//! * [`ising`]: the Ising/QUBO encoding, conditioning and precision audit;
//! * [`solvers`]: random, black-first greedy, simulated annealing, tabu
//!   search, an exact oracle and quota repair;
//! * [`benchmark`]: the improvement-over-random protocol and reports;
//! * [`cli`]: the `mcps` command line.

pub mod benchmark;
pub mod cli;
pub mod error;
pub mod generate;
pub mod ising;
pub mod model;
pub mod seed;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{CarWord, Color, Coloring, EnsembleId, OrderSpec, ProblemInstance};
