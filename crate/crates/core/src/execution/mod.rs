//! Turn-by-turn execution of a synthesized strategy against human policies.

mod policy;

pub use policy::{HumanAgent, HumanPolicy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{game_hash, Owner};
use crate::par::{self, Parallelism};
use crate::product::ProductGame;
use crate::regret::RegretStrategy;
use crate::Cost;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("strategy was synthesized for game {expected}, not {found}")]
    HashMismatch { expected: String, found: String },
    #[error("it is not the {0}'s turn")]
    WrongTurn(Owner),
    #[error("the play is already finished")]
    Finished,
    #[error("strategy has no entry for state {state} with u = {u}, b = {b}")]
    MissingCell { state: String, u: u32, b: Cost },
    #[error("illegal action `{action}`; legal actions: {}", legal.join(", "))]
    IllegalAction { action: String, legal: Vec<String> },
    #[error("play exceeded the step cap of {cap}")]
    StepCap { cap: usize },
    #[error("human input ended: {0}")]
    Input(String),
}

/// Position of a play: product state plus the strategy memory `(u, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayState {
    pub state: usize,
    pub u: u32,
    pub b: Cost,
    pub turn: Owner,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayStep {
    pub step: usize,
    pub actor: Owner,
    pub action: String,
    pub cost: u32,
    /// Cumulative robot cost after this step.
    pub payoff: u32,
    /// Product state reached.
    pub state: String,
    /// Atoms holding in the reached world state.
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PlayTrace {
    pub steps: Vec<PlayStep>,
    pub payoff: u32,
    pub satisfied: bool,
    /// Running best-alternate minimum at the end of the play.
    pub final_b: Cost,
    /// `payoff - min(final_b, payoff)`.
    pub regret: Cost,
}

impl PlayTrace {
    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("step serializes") + "\n")
            .collect()
    }
}

fn snapshot(p: &ProductGame, state: usize, u: u32, b: Cost) -> PlayState {
    PlayState {
        state,
        u,
        b,
        turn: p.owner(state),
        done: p.is_accepting(state),
    }
}

/// Root position `(s0, 0, inf)`.
pub fn start(strategy: &RegretStrategy, p: &ProductGame) -> Result<PlayState, ExecError> {
    let found = game_hash(p.game());
    if found != strategy.game_hash {
        return Err(ExecError::HashMismatch {
            expected: strategy.game_hash.clone(),
            found,
        });
    }
    Ok(snapshot(p, p.init(), 0, Cost::Infinite))
}

/// Human actions available at `st`.
pub fn legal_actions(p: &ProductGame, st: &PlayState) -> Vec<String> {
    if st.done {
        return Vec::new();
    }
    p.moves(st.state).map(|e| e.action.clone()).collect()
}

/// The strategy's move at `st`. Returns the action, its cost and the new
/// position.
pub fn robot_move(
    strategy: &RegretStrategy,
    p: &ProductGame,
    st: &PlayState,
) -> Result<(String, u32, PlayState), ExecError> {
    if st.done {
        return Err(ExecError::Finished);
    }
    if st.turn != Owner::Robot {
        return Err(ExecError::WrongTurn(Owner::Robot));
    }
    let missing = || ExecError::MissingCell {
        state: p.name(st.state),
        u: st.u,
        b: st.b,
    };
    let row = strategy.lookup(st.state, st.u, st.b).ok_or_else(missing)?;
    let (action, ba) = match (&row.action, row.ba) {
        (Some(a), Some(ba)) => (a.clone(), ba),
        _ => return Err(missing()),
    };
    let e = p.successor(st.state, &action).ok_or_else(missing)?;
    let next = snapshot(p, e.target, st.u + e.cost, st.b.min(ba));
    Ok((action, e.cost, next))
}

/// Applies a human action at `st`.
pub fn human_move(p: &ProductGame, st: &PlayState, action: &str) -> Result<PlayState, ExecError> {
    if st.done {
        return Err(ExecError::Finished);
    }
    if st.turn != Owner::Human {
        return Err(ExecError::WrongTurn(Owner::Human));
    }
    match p.successor(st.state, action) {
        Some(e) if action != crate::product::ABSORB => Ok(snapshot(p, e.target, st.u, st.b)),
        _ => Err(ExecError::IllegalAction {
            action: action.to_string(),
            legal: legal_actions(p, st),
        }),
    }
}

/// A play in progress together with its trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Play {
    pub state: PlayState,
    pub trace: PlayTrace,
}

impl Play {
    pub fn new(strategy: &RegretStrategy, p: &ProductGame) -> Result<Play, ExecError> {
        start(strategy, p)?;
        Ok(Play::at_start(p))
    }

    /// Like [`Play::new`] for a strategy already checked against `p`.
    fn at_start(p: &ProductGame) -> Play {
        let mut play = Play {
            state: snapshot(p, p.init(), 0, Cost::Infinite),
            trace: PlayTrace::default(),
        };
        play.finish_bookkeeping(p);
        play
    }

    fn record(&mut self, p: &ProductGame, actor: Owner, action: String, cost: u32) {
        let st = p.state(self.state.state);
        self.trace.steps.push(PlayStep {
            step: self.trace.steps.len() + 1,
            actor,
            action,
            cost,
            payoff: self.state.u,
            state: p.name(self.state.state),
            labels: p.game().state(st.v).labels.iter().cloned().collect(),
        });
        self.finish_bookkeeping(p);
    }

    fn finish_bookkeeping(&mut self, p: &ProductGame) {
        self.trace.payoff = self.state.u;
        self.trace.satisfied = p.is_accepting(self.state.state);
        self.trace.final_b = self.state.b;
        self.trace.regret = Cost::Finite(self.state.u).saturating_sub(self.state.b);
    }

    pub fn robot(&mut self, strategy: &RegretStrategy, p: &ProductGame) -> Result<String, ExecError> {
        let (action, cost, next) = robot_move(strategy, p, &self.state)?;
        self.state = next;
        self.record(p, Owner::Robot, action.clone(), cost);
        Ok(action)
    }

    pub fn human(&mut self, p: &ProductGame, action: &str) -> Result<(), ExecError> {
        self.state = human_move(p, &self.state, action)?;
        self.record(p, Owner::Human, action.to_string(), 0);
        Ok(())
    }

    /// Plays robot moves until the human must act or the play ends.
    pub fn robot_until_human(&mut self, strategy: &RegretStrategy, p: &ProductGame) -> Result<(), ExecError> {
        while !self.state.done && self.state.turn == Owner::Robot {
            self.robot(strategy, p)?;
        }
        Ok(())
    }
}

/// Runs a play to completion with `agent` choosing the human moves.
pub fn simulate_with(
    strategy: &RegretStrategy,
    p: &ProductGame,
    agent: &mut dyn HumanAgent,
) -> Result<PlayTrace, ExecError> {
    play_out(strategy, p, agent, Play::new(strategy, p)?)
}

fn play_out(
    strategy: &RegretStrategy,
    p: &ProductGame,
    agent: &mut dyn HumanAgent,
    mut play: Play,
) -> Result<PlayTrace, ExecError> {
    let cap = strategy.stats.best_response_nodes + 1;
    while !play.state.done {
        if play.trace.steps.len() >= cap {
            return Err(ExecError::StepCap { cap });
        }
        match play.state.turn {
            Owner::Robot => {
                play.robot(strategy, p)?;
            }
            Owner::Human => {
                let legal = legal_actions(p, &play.state);
                let a = agent.choose(strategy, p, &play.state, &legal)?;
                play.human(p, &a)?;
            }
        }
    }
    Ok(play.trace)
}

/// Runs a play with a built-in policy; deterministic given `seed`.
pub fn simulate(
    strategy: &RegretStrategy,
    p: &ProductGame,
    policy: &HumanPolicy,
    seed: u64,
) -> Result<PlayTrace, ExecError> {
    let mut agent = policy.agent(strategy, p, seed);
    simulate_with(strategy, p, agent.as_mut())
}

/// Independent plays, one per `(policy, seed)`, in parallel when enabled.
pub fn simulate_batch(
    strategy: &RegretStrategy,
    p: &ProductGame,
    runs: &[(HumanPolicy, u64)],
    mode: Parallelism,
) -> Vec<Result<PlayTrace, ExecError>> {
    // hashing the game dominates short plays, so check it once
    if let Err(e) = start(strategy, p) {
        return runs.iter().map(|_| Err(e.clone())).collect();
    }
    par::map(mode, runs, |(policy, seed)| {
        let mut agent = policy.agent(strategy, p, *seed);
        play_out(strategy, p, agent.as_mut(), Play::at_start(p))
    })
}
