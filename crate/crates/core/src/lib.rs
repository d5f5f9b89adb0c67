//! Cone programming toolkit for generalised probabilistic theories.
//!
//! Systems are modelled as triples of a state cone, an effect cone and a unit
//! effect. Bob's optimal guessing probability in an integer-commitment
//! protocol is a cone program; its dual optimum is used to build a cheating
//! strategy for Alice, and the two are checked against the trade-off
//! `P_A * P_B >= alpha / n`.

pub mod commitment;
pub mod coneprog;
pub mod cones;
pub mod error;
pub mod gpt;
pub mod linalg;
pub mod oracles;
pub mod purify;

pub use coneprog::{ConeProgram, ConeSolution, Residuals, Sense, SolveStatus, SolverOptions};
pub use cones::{CompositionRule, ConeSpec, ConeVector};
pub use error::{Error, Result};
