//! The DFA game: the synchronous product of a game graph with a task DFA,
//! plus its two baseline solvers (cooperative and adversarial values).

mod compose;
mod solve;

pub use compose::{compose, LabelTiming, ProductConfig, ProductEdge, ProductGame, ProductState, ABSORB};
pub use solve::{adversarial_values, coop_values, AdversarialSolution};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("game labels use atom `{atom}` which is not in the automaton alphabet")]
    AlphabetMismatch { atom: String },
}
