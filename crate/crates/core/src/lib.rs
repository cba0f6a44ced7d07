//! Regret-minimizing reactive synthesis for turn-based human-robot games.
//!
//! The pipeline is: parse an LTLf task ([`ltlf`]), compile it to a DFA,
//! compose it with a game abstraction ([`game`]) into a DFA game
//! ([`product`]), then synthesize a robot strategy that guarantees task
//! completion within an energy budget while minimizing worst-case regret
//! ([`regret`]). [`execution`] plays strategies against human policies.

pub mod cost;
pub mod execution;
pub mod game;
pub mod ltlf;
pub mod par;
pub mod product;
pub mod random;
pub mod regret;

pub use cost::Cost;
