use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use regsynth_core::execution::PlayTrace;
use regsynth_core::game::{Owner, Preset, ARCH_FORMULA};
use regsynth_core::regret::{RegretError, SynthStats};
use regsynth_core::Cost;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use crate::session::{build_artifacts, now, robot_reply, Session, SessionError};
use crate::store::SessionStore;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    /// `toy`, `arch` or `line`.
    #[serde(default)]
    pub scenario: Option<String>,
    /// A game document, as in game files.
    #[serde(default)]
    pub game: Option<Value>,
    #[serde(default)]
    pub formula: Option<String>,
    #[serde(default)]
    pub budget: Option<u32>,
    #[serde(default)]
    pub consume_initial_label: bool,
    #[serde(default)]
    pub budgeted_ba: bool,
}

/// Everything a client needs to render the current position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub id: String,
    pub state: String,
    pub labels: Vec<String>,
    /// Block positions, for blocks-world scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world: Option<BTreeMap<String, String>>,
    pub turn: Owner,
    pub legal_actions: Vec<String>,
    pub last_robot_action: Option<String>,
    pub payoff: u32,
    pub budget: u32,
    pub budget_remaining: u32,
    /// Regret the strategy still guarantees from here.
    pub regret_bound: Cost,
    pub root_regret: Cost,
    pub steps: usize,
    pub done: bool,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub formula: String,
    pub default_budget: u32,
    pub description: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionRequest {
    action: String,
    /// Number of steps the client has seen; stale posts are rejected.
    #[serde(default)]
    step: Option<usize>,
}

struct ApiError(StatusCode, Value);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

fn error(status: StatusCode, message: impl ToString) -> ApiError {
    ApiError(status, json!({ "error": message.to_string() }))
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Synthesis(RegretError::Infeasible { budget, min_budget }) => ApiError(
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({
                    "error": e.to_string(),
                    "budget": budget,
                    "min_budget": min_budget,
                }),
            ),
            SessionError::Synthesis(RegretError::NodeBudget { .. }) => {
                error(StatusCode::UNPROCESSABLE_ENTITY, e)
            }
            other => error(StatusCode::BAD_REQUEST, other),
        }
    }
}

type Shared = Arc<SessionStore>;

pub fn router(store: Shared) -> Router {
    Router::new()
        .route("/scenarios", get(scenarios))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(view).delete(remove))
        .route("/sessions/{id}/actions", post(act))
        .route("/sessions/{id}/trace", get(trace))
        .layer(CorsLayer::permissive())
        .with_state(store)
}

async fn scenarios() -> Json<Vec<ScenarioInfo>> {
    let mut out = vec![ScenarioInfo {
        name: "toy".into(),
        formula: ARCH_FORMULA.into(),
        default_budget: 7,
        description: "seven-state arch game: place the top block near or away from the human".into(),
    }];
    for p in Preset::ALL {
        out.push(ScenarioInfo {
            name: p.name().into(),
            formula: p.formula().into(),
            default_budget: p.default_budget(),
            description: match p {
                Preset::Arch => "build an arch with the green block on top".into(),
                Preset::Line => "line up pink, blue and green from top to bottom".into(),
            },
        });
    }
    Json(out)
}

#[derive(Serialize)]
struct Created {
    id: String,
    root_regret: Cost,
    stats: SynthStats,
    view: View,
}

async fn create(State(store): State<Shared>, body: axum::body::Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest =
        serde_json::from_slice(&body).map_err(|e| error(StatusCode::BAD_REQUEST, format!("invalid request: {e}")))?;
    let artifacts = tokio::task::spawn_blocking(move || build_artifacts(req))
        .await
        .map_err(|e| error(StatusCode::INTERNAL_SERVER_ERROR, e))??;
    let id = uuid::Uuid::new_v4().to_string();
    let session = store.insert(Session::start(id.clone(), artifacts)?);
    let live = session.live.lock().await;
    let body = Created {
        id,
        root_regret: session.artifacts.strategy.root_regret,
        stats: session.artifacts.strategy.stats.clone(),
        view: session.view(&live),
    };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

fn find(store: &SessionStore, id: &str) -> Result<Arc<Session>, ApiError> {
    store
        .get(id)
        .ok_or_else(|| error(StatusCode::NOT_FOUND, format!("no session `{id}`")))
}

async fn view(State(store): State<Shared>, Path(id): Path<String>) -> Result<Json<View>, ApiError> {
    let s = find(&store, &id)?;
    let live = s.live.lock().await;
    Ok(Json(s.view(&live)))
}

async fn trace(State(store): State<Shared>, Path(id): Path<String>) -> Result<Json<PlayTrace>, ApiError> {
    let s = find(&store, &id)?;
    let live = s.live.lock().await;
    Ok(Json(live.play.trace.clone()))
}

async fn remove(State(store): State<Shared>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    if store.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(error(StatusCode::NOT_FOUND, format!("no session `{id}`")))
    }
}

async fn act(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> Result<Json<View>, ApiError> {
    let req: ActionRequest =
        serde_json::from_slice(&body).map_err(|e| error(StatusCode::BAD_REQUEST, format!("invalid request: {e}")))?;
    let s = find(&store, &id)?;
    let mut live = s
        .live
        .try_lock()
        .map_err(|_| error(StatusCode::CONFLICT, "another action is being applied"))?;
    if live.play.state.done {
        return Err(error(StatusCode::CONFLICT, "the play is already finished"));
    }
    if live.play.state.turn != Owner::Human {
        return Err(error(StatusCode::CONFLICT, "it is not the human's turn"));
    }
    if let Some(step) = req.step {
        if step != live.play.trace.steps.len() {
            return Err(error(StatusCode::CONFLICT, "stale action: the play has moved on"));
        }
    }
    let a = &s.artifacts;
    if let Err(e) = live.play.human(&a.product, &req.action) {
        let legal = match &e {
            regsynth_core::execution::ExecError::IllegalAction { legal, .. } => legal.clone(),
            _ => Vec::new(),
        };
        return Err(ApiError(
            StatusCode::BAD_REQUEST,
            json!({ "error": e.to_string(), "legal_actions": legal }),
        ));
    }
    let reply = robot_reply(a, &mut live.play).map_err(|e| error(StatusCode::INTERNAL_SERVER_ERROR, e))?;
    if reply.is_some() {
        live.last_robot_action = reply;
    }
    live.updated = now();
    Ok(Json(s.view(&live)))
}
