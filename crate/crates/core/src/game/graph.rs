use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GameError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Robot,
    Human,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::Robot => "robot",
            Owner::Human => "human",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub id: String,
    pub owner: Owner,
    pub labels: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameEdge {
    pub action: String,
    pub target: usize,
    pub cost: u32,
}

/// The turn-based manipulation abstraction: robot and human states, labeled
/// by the atoms that hold there, connected by deterministic action edges
/// with non-negative integer energy costs.
///
/// A value of this type has passed every structural check in
/// [`GameGraph::new`] and is immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameGraph {
    props: BTreeSet<String>,
    states: Vec<GameState>,
    init: usize,
    /// Outgoing edges per state, sorted by action name.
    edges: Vec<Vec<GameEdge>>,
    index: HashMap<String, usize>,
}

/// An edge given by state ids, as read from a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpec {
    pub from: String,
    pub action: String,
    pub to: String,
    pub cost: u32,
}

impl GameGraph {
    /// Builds and validates a game.
    ///
    /// Enforced: unique state ids, known endpoints and labels, human edges
    /// cost 0 and robot edges at least 1, one edge per (state, action), every
    /// human state can move, strict robot/human alternation, and disjoint
    /// robot/human action names.
    pub fn new(
        props: BTreeSet<String>,
        states: Vec<GameState>,
        init: &str,
        edge_specs: Vec<EdgeSpec>,
    ) -> Result<GameGraph, GameError> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(GameError::DuplicateState { id: s.id.clone() });
            }
            if let Some(atom) = s.labels.iter().find(|a| !props.contains(*a)) {
                return Err(GameError::UnknownLabel {
                    state: s.id.clone(),
                    atom: atom.clone(),
                });
            }
        }
        let init = *index
            .get(init)
            .ok_or_else(|| GameError::UnknownInit { id: init.to_string() })?;

        let mut edges: Vec<Vec<GameEdge>> = vec![Vec::new(); states.len()];
        let mut action_owner: BTreeMap<String, Owner> = BTreeMap::new();
        for spec in edge_specs {
            let from = *index
                .get(&spec.from)
                .ok_or_else(|| GameError::UnknownState { id: spec.from.clone() })?;
            let to = *index
                .get(&spec.to)
                .ok_or_else(|| GameError::UnknownState { id: spec.to.clone() })?;
            let owner = states[from].owner;
            match owner {
                Owner::Human if spec.cost != 0 => {
                    return Err(GameError::HumanEdgeCost {
                        from: spec.from,
                        action: spec.action,
                        cost: spec.cost,
                    })
                }
                Owner::Robot if spec.cost == 0 => {
                    return Err(GameError::RobotEdgeCost {
                        from: spec.from,
                        action: spec.action,
                    })
                }
                _ => {}
            }
            if states[to].owner == owner {
                return Err(GameError::Alternation {
                    from: spec.from,
                    action: spec.action,
                    to: spec.to,
                });
            }
            match action_owner.get(&spec.action) {
                Some(&o) if o != owner => {
                    return Err(GameError::ActionOwnerConflict { action: spec.action })
                }
                _ => {
                    action_owner.insert(spec.action.clone(), owner);
                }
            }
            if edges[from].iter().any(|e| e.action == spec.action) {
                return Err(GameError::Nondeterministic {
                    state: spec.from,
                    action: spec.action,
                });
            }
            edges[from].push(GameEdge {
                action: spec.action,
                target: to,
                cost: spec.cost,
            });
        }
        for (i, s) in states.iter().enumerate() {
            if s.owner == Owner::Human && edges[i].is_empty() {
                return Err(GameError::HumanWithoutMoves { state: s.id.clone() });
            }
        }
        for out in &mut edges {
            out.sort_by(|a, b| a.action.cmp(&b.action));
        }
        Ok(GameGraph {
            props,
            states,
            init,
            edges,
            index,
        })
    }

    pub fn props(&self) -> &BTreeSet<String> {
        &self.props
    }

    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    pub fn state(&self, v: usize) -> &GameState {
        &self.states[v]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn edges(&self, v: usize) -> &[GameEdge] {
        &self.edges[v]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn lookup(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Successor of `v` under `action`, if enabled.
    pub fn successor(&self, v: usize, action: &str) -> Option<&GameEdge> {
        self.edges[v].iter().find(|e| e.action == action)
    }

    /// Action names used on robot edges (`A_s`) and human edges (`A_e`).
    pub fn action_universes(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut robot = BTreeSet::new();
        let mut human = BTreeSet::new();
        for (v, out) in self.edges.iter().enumerate() {
            let set = match self.states[v].owner {
                Owner::Robot => &mut robot,
                Owner::Human => &mut human,
            };
            set.extend(out.iter().map(|e| e.action.clone()));
        }
        (robot, human)
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.init];
        seen[self.init] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges[v] {
                if !seen[e.target] {
                    seen[e.target] = true;
                    stack.push(e.target);
                }
            }
        }
        seen
    }

    /// True if some cycle has total cost 0. Never holds for a validated
    /// graph, since alternation puts a robot edge on every cycle.
    pub fn has_zero_cost_cycle(&self) -> bool {
        // Kahn's algorithm on the subgraph of zero-cost edges
        let n = self.states.len();
        let mut indeg = vec![0usize; n];
        for out in &self.edges {
            for e in out.iter().filter(|e| e.cost == 0) {
                indeg[e.target] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for e in self.edges[v].iter().filter(|e| e.cost == 0) {
                indeg[e.target] -= 1;
                if indeg[e.target] == 0 {
                    stack.push(e.target);
                }
            }
        }
        removed < n
    }
}
