//! LTLf front end: parsing, reference semantics, progression and
//! compilation to minimal DFAs.

mod dfa;
mod formula;
mod parser;
mod semantics;

pub use dfa::{build_dfa, build_dfa_with, minimize, Dfa, DfaOptions, DEFAULT_STATE_CAP, MAX_PROPS};
pub use formula::Formula;
pub use parser::{parse, parse_open};
pub use semantics::{epsilon_eval, progress, satisfies, Letter, MaskLetter, Valuation};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlfError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown atom `{atom}` at byte {offset}")]
    UnknownAtom { atom: String, offset: usize },
    #[error("atom `{atom}` is not in the automaton alphabet")]
    AlphabetMismatch { atom: String },
    #[error("{props} propositions exceed the supported maximum of {max}")]
    AlphabetTooLarge { props: usize, max: usize },
    #[error("automaton construction exceeded {cap} states; the formula is too large")]
    StateBudget { cap: usize },
}
