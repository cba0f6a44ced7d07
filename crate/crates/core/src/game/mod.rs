//! The manipulation-domain abstraction: a turn-based two-player graph with
//! robot/human ownership, state labels and robot energy costs.

mod dot;
mod file;
mod graph;
pub mod scenario;

pub use dot::export_dot;
pub use file::{game_hash, load_game, save_game, EdgeDoc, GameDocument, StateDoc};
pub use graph::{EdgeSpec, GameEdge, GameGraph, GameState, Owner};
pub use scenario::{generate_scenario, parse_state_id, Preset, Scenario, ScenarioParams};

use thiserror::Error;

/// The arch-building task.
pub const ARCH_FORMULA: &str = "F(g_top & b_s1 & b_s2) & G(!(b_s1 & b_s2) -> !g_top)";

/// The three-block line task.
pub const LINE_FORMULA: &str = "F(pink_top & blue_mid & green_bot)";

/// Seven-state game where the robot places the top block either near the
/// human (cheap, but the human may knock a support away) or away from them.
pub const TOY_GAME: &str = include_str!("../../data/toy.json");

pub fn toy_game() -> GameGraph {
    load_game(TOY_GAME).expect("bundled toy game is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game file parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate state id `{id}`")]
    DuplicateState { id: String },
    #[error("unknown state `{id}`")]
    UnknownState { id: String },
    #[error("initial state `{id}` is not declared")]
    UnknownInit { id: String },
    #[error("state `{state}` is labeled with undeclared proposition `{atom}`")]
    UnknownLabel { state: String, atom: String },
    #[error("human edge must cost 0: `{from}` --{action}--> costs {cost}")]
    HumanEdgeCost {
        from: String,
        action: String,
        cost: u32,
    },
    #[error("robot edge must cost at least 1: `{from}` --{action}-->")]
    RobotEdgeCost { from: String, action: String },
    #[error("nondeterministic action: `{state}` has more than one `{action}` edge")]
    Nondeterministic { state: String, action: String },
    #[error("human state `{state}` has no outgoing edge")]
    HumanWithoutMoves { state: String },
    #[error("alternation violated: `{from}` --{action}--> `{to}` stays with the same player")]
    Alternation {
        from: String,
        action: String,
        to: String,
    },
    #[error("action `{action}` is used by both the robot and the human")]
    ActionOwnerConflict { action: String },
    #[error("invalid scenario parameters: {0}")]
    Scenario(String),
    #[error("capacity error: {locations} locations cannot hold {blocks} blocks")]
    Capacity { blocks: usize, locations: usize },
}
