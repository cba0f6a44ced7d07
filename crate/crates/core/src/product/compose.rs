use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ProductError;
use crate::game::{GameGraph, Owner};
use crate::ltlf::Dfa;

/// Action name of the zero-cost self-loop on accepting states.
pub const ABSORB: &str = "_absorb";

/// Which state's label the automaton reads when the game moves `v -> v'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelTiming {
    /// Read `L(v)`: the world before the move.
    Source,
    /// Read `L(v')`: the world the move produces.
    #[default]
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProductConfig {
    pub label_timing: LabelTiming,
    /// Start the automaton at `delta(z0, L(v0))` instead of `z0`.
    pub consume_initial_label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductState {
    /// Game state index.
    pub v: usize,
    /// DFA state.
    pub z: usize,
    pub owner: Owner,
    pub accepting: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEdge {
    pub action: String,
    pub target: usize,
    pub cost: u32,
}

/// Reachable part of `G x A`. State 0 is the initial state and ids follow
/// breadth-first discovery with edges in action order.
#[derive(Debug, Clone)]
pub struct ProductGame {
    game: GameGraph,
    dfa: Dfa,
    config: ProductConfig,
    states: Vec<ProductState>,
    edges: Vec<Vec<ProductEdge>>,
    masks: Vec<u32>,
}

/// Builds the reachable product of `g` and `dfa`.
pub fn compose(g: &GameGraph, dfa: &Dfa, config: ProductConfig) -> Result<ProductGame, ProductError> {
    let masks = g
        .states()
        .iter()
        .map(|s| {
            dfa.mask_of(s.labels.iter()).map_err(|e| match e {
                crate::ltlf::LtlfError::AlphabetMismatch { atom } => ProductError::AlphabetMismatch { atom },
                other => unreachable!("mask_of only reports alphabet errors: {other}"),
            })
        })
        .collect::<Result<Vec<u32>, _>>()?;

    let v0 = g.init();
    let z0 = if config.consume_initial_label {
        dfa.step(dfa.initial, masks[v0])
    } else {
        dfa.initial
    };

    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = Vec::new();
    let mut edges: Vec<Vec<ProductEdge>> = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |v: usize, z: usize, states: &mut Vec<ProductState>, queue: &mut VecDeque<usize>| {
        *index.entry((v, z)).or_insert_with(|| {
            let id = states.len();
            states.push(ProductState {
                v,
                z,
                owner: g.state(v).owner,
                accepting: dfa.is_accepting(z),
            });
            queue.push_back(id);
            id
        })
    };
    intern(v0, z0, &mut states, &mut queue);

    while let Some(s) = queue.pop_front() {
        let ProductState { v, z, accepting, .. } = states[s];
        let mut out = Vec::new();
        if accepting {
            out.push(ProductEdge {
                action: ABSORB.to_string(),
                target: s,
                cost: 0,
            });
        } else {
            for e in g.edges(v) {
                let read = match config.label_timing {
                    LabelTiming::Source => masks[v],
                    LabelTiming::Target => masks[e.target],
                };
                let t = intern(e.target, dfa.step(z, read), &mut states, &mut queue);
                out.push(ProductEdge {
                    action: e.action.clone(),
                    target: t,
                    cost: e.cost,
                });
            }
        }
        if edges.len() <= s {
            edges.resize_with(s + 1, Vec::new);
        }
        edges[s] = out;
    }

    Ok(ProductGame {
        game: g.clone(),
        dfa: dfa.clone(),
        config,
        states,
        edges,
        masks,
    })
}

impl ProductGame {
    pub fn game(&self) -> &GameGraph {
        &self.game
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn config(&self) -> ProductConfig {
        self.config
    }

    pub fn init(&self) -> usize {
        0
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn state(&self, s: usize) -> &ProductState {
        &self.states[s]
    }

    pub fn edges(&self, s: usize) -> &[ProductEdge] {
        &self.edges[s]
    }

    pub fn owner(&self, s: usize) -> Owner {
        self.states[s].owner
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.states[s].accepting
    }

    /// Label mask of the underlying game state.
    pub fn mask(&self, s: usize) -> u32 {
        self.masks[self.states[s].v]
    }

    /// `v@qz`, where `v` is the game state id.
    pub fn name(&self, s: usize) -> String {
        let st = &self.states[s];
        format!("{}@q{}", self.game.state(st.v).id, st.z)
    }

    /// Moves available to the player at `s`, excluding the absorbing loop.
    pub fn moves(&self, s: usize) -> impl Iterator<Item = &ProductEdge> {
        self.edges[s].iter().filter(|e| e.action != ABSORB)
    }

    pub fn successor(&self, s: usize, action: &str) -> Option<&ProductEdge> {
        self.edges[s].iter().find(|e| e.action == action)
    }

    /// Graphviz rendering; accepting states are double circles, robot states
    /// boxes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph product {\n  init [shape=point];\n");
        for s in 0..self.num_states() {
            let shape = match (self.states[s].accepting, self.states[s].owner) {
                (true, _) => "doublecircle",
                (false, Owner::Robot) => "box",
                (false, Owner::Human) => "circle",
            };
            let _ = writeln!(out, "  s{s} [shape={shape}, label=\"{}\"];", self.name(s).replace('"', "\\\""));
        }
        let _ = writeln!(out, "  init -> s0;");
        for s in 0..self.num_states() {
            for e in &self.edges[s] {
                let _ = writeln!(
                    out,
                    "  s{s} -> s{} [label=\"{}/{}\"];",
                    e.target,
                    e.action.replace('"', "\\\""),
                    e.cost
                );
            }
        }
        out.push_str("}\n");
        out
    }
}
