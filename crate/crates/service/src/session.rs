use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use regsynth_core::execution::{legal_actions, ExecError, Play};
use regsynth_core::game::{
    generate_scenario, parse_state_id, toy_game, GameDocument, GameError, GameGraph, Preset, ScenarioParams,
    ARCH_FORMULA,
};
use regsynth_core::ltlf::{build_dfa, parse, LtlfError};
use regsynth_core::product::{compose, LabelTiming, ProductConfig, ProductError, ProductGame};
use regsynth_core::regret::{synthesize, RegretError, RegretStrategy, SynthConfig};
use regsynth_core::Cost;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Mutex;

use crate::api::{CreateRequest, View};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Formula(#[from] LtlfError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Synthesis(#[from] RegretError),
    #[error(transparent)]
    Play(#[from] ExecError),
}

/// Immutable results of synthesis for one session.
#[derive(Debug)]
pub struct Artifacts {
    pub request: CreateRequest,
    pub preset: Option<String>,
    pub product: ProductGame,
    pub strategy: RegretStrategy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Live {
    pub play: Play,
    pub last_robot_action: Option<String>,
    pub updated: u64,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub created: u64,
    pub artifacts: Artifacts,
    pub live: Mutex<Live>,
}

pub(crate) fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Builds the game, formula and budget a request describes.
fn resolve(req: &CreateRequest) -> Result<(GameGraph, String, u32, Option<String>), SessionError> {
    match (&req.scenario, &req.game) {
        (Some(_), Some(_)) => Err(SessionError::Invalid(
            "give either `scenario` or `game`, not both".into(),
        )),
        (None, None) => Err(SessionError::Invalid("one of `scenario` or `game` is required".into())),
        (Some(name), None) if name == "toy" => {
            let formula = req.formula.clone().unwrap_or_else(|| ARCH_FORMULA.to_string());
            Ok((toy_game(), formula, req.budget.unwrap_or(7), Some(name.clone())))
        }
        (Some(name), None) => {
            let preset: Preset = name.parse()?;
            let sc = generate_scenario(&ScenarioParams::minimal(preset))?;
            let formula = req.formula.clone().unwrap_or(sc.formula);
            Ok((sc.game, formula, req.budget.unwrap_or(sc.budget), Some(name.clone())))
        }
        (None, Some(doc)) => {
            let doc: GameDocument = serde_json::from_value(doc.clone())
                .map_err(|e| SessionError::Invalid(format!("invalid game document: {e}")))?;
            let game = doc.into_graph()?;
            let formula = req
                .formula
                .clone()
                .ok_or_else(|| SessionError::Invalid("`formula` is required with a game document".into()))?;
            let budget = req
                .budget
                .ok_or_else(|| SessionError::Invalid("`budget` is required with a game document".into()))?;
            Ok((game, formula, budget, None))
        }
    }
}

/// Synthesizes the strategy for a request. CPU bound; call off the async
/// executor.
pub fn build_artifacts(req: CreateRequest) -> Result<Artifacts, SessionError> {
    let (game, formula, budget, preset) = resolve(&req)?;
    let f = parse(&formula, game.props())?;
    let dfa = build_dfa(&f, game.props())?;
    let config = ProductConfig {
        label_timing: LabelTiming::Target,
        consume_initial_label: req.consume_initial_label,
    };
    let product = compose(&game, &dfa, config)?;
    let cfg = SynthConfig {
        budgeted_ba: req.budgeted_ba,
        ..SynthConfig::default()
    };
    let strategy = synthesize(&product, budget, &formula, cfg)?;
    Ok(Artifacts {
        request: req,
        preset,
        product,
        strategy,
    })
}

impl Session {
    /// A fresh session; the robot's opening moves are already played.
    pub fn start(id: String, artifacts: Artifacts) -> Result<Session, SessionError> {
        let mut play = Play::new(&artifacts.strategy, &artifacts.product)?;
        let last = robot_reply(&artifacts, &mut play)?;
        let t = now();
        Ok(Session {
            id,
            created: t,
            artifacts,
            live: Mutex::new(Live {
                play,
                last_robot_action: last,
                updated: t,
            }),
        })
    }

    pub fn view(&self, live: &Live) -> View {
        let a = &self.artifacts;
        let p = &a.product;
        let st = &live.play.state;
        let ps = p.state(st.state);
        let gs = p.game().state(ps.v);
        let world: Option<BTreeMap<String, String>> = match a.preset.as_deref() {
            Some("arch") | Some("line") => parse_state_id(&gs.id),
            _ => None,
        };
        let bound = a
            .strategy
            .lookup(st.state, st.u, st.b)
            .map(|r| r.value)
            .unwrap_or(Cost::Infinite);
        View {
            id: self.id.clone(),
            state: p.name(st.state),
            labels: gs.labels.iter().cloned().collect(),
            world,
            turn: st.turn,
            legal_actions: if st.turn == regsynth_core::game::Owner::Human {
                legal_actions(p, st)
            } else {
                Vec::new()
            },
            last_robot_action: live.last_robot_action.clone(),
            payoff: st.u,
            budget: a.strategy.budget,
            budget_remaining: a.strategy.budget.saturating_sub(st.u),
            regret_bound: bound,
            root_regret: a.strategy.root_regret,
            steps: live.play.trace.steps.len(),
            done: st.done,
            satisfied: live.play.trace.satisfied,
        }
    }

    /// Human actions posted so far, in order.
    pub fn human_actions(live: &Live) -> Vec<String> {
        live.play
            .trace
            .steps
            .iter()
            .filter(|s| s.actor == regsynth_core::game::Owner::Human)
            .map(|s| s.action.clone())
            .collect()
    }
}

/// Plays robot moves until the human must act; returns the last one.
pub(crate) fn robot_reply(a: &Artifacts, play: &mut Play) -> Result<Option<String>, ExecError> {
    let mut last = None;
    while !play.state.done && play.state.turn == regsynth_core::game::Owner::Robot {
        last = Some(play.robot(&a.strategy, &a.product)?);
    }
    Ok(last)
}
