use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::graph::{EdgeSpec, GameGraph, GameState, Owner};
use super::GameError;

/// On-disk game document.
///
/// ```json
/// { "props": ["p"],
///   "states": [{"id": "v0", "owner": "robot", "labels": []}],
///   "init": "v0",
///   "edges": [{"from": "v0", "action": "a", "to": "v1", "cost": 1}] }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub props: Vec<String>,
    pub states: Vec<StateDoc>,
    pub init: String,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub id: String,
    pub owner: Owner,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub action: String,
    pub to: String,
    pub cost: u32,
}

impl GameDocument {
    pub fn into_graph(self) -> Result<GameGraph, GameError> {
        let props: BTreeSet<String> = self.props.into_iter().collect();
        let states = self
            .states
            .into_iter()
            .map(|s| GameState {
                id: s.id,
                owner: s.owner,
                labels: s.labels.into_iter().collect(),
            })
            .collect();
        let edges = self
            .edges
            .into_iter()
            .map(|e| EdgeSpec {
                from: e.from,
                action: e.action,
                to: e.to,
                cost: e.cost,
            })
            .collect();
        GameGraph::new(props, states, &self.init, edges)
    }

    pub fn from_graph(g: &GameGraph) -> GameDocument {
        GameDocument {
            props: g.props().iter().cloned().collect(),
            states: g
                .states()
                .iter()
                .map(|s| StateDoc {
                    id: s.id.clone(),
                    owner: s.owner,
                    labels: s.labels.iter().cloned().collect(),
                })
                .collect(),
            init: g.state(g.init()).id.clone(),
            edges: (0..g.num_states())
                .flat_map(|v| {
                    g.edges(v).iter().map(move |e| EdgeDoc {
                        from: g.state(v).id.clone(),
                        action: e.action.clone(),
                        to: g.state(e.target).id.clone(),
                        cost: e.cost,
                    })
                })
                .collect(),
        }
    }
}

/// Parses and validates a game document.
pub fn load_game(text: &str) -> Result<GameGraph, GameError> {
    let doc: GameDocument = serde_json::from_str(text).map_err(|e| GameError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.into_graph()
}

/// Pretty JSON in the document format; stable for a given graph.
pub fn save_game(g: &GameGraph) -> String {
    serde_json::to_string_pretty(&GameDocument::from_graph(g)).expect("game document serializes")
}

/// Hex SHA-256 of the canonical compact document.
pub fn game_hash(g: &GameGraph) -> String {
    let canonical =
        serde_json::to_vec(&GameDocument::from_graph(g)).expect("game document serializes");
    hex::encode(Sha256::digest(&canonical))
}
