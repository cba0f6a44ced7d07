use std::collections::HashMap;

use super::RegretError;
use crate::game::Owner;
use crate::par::{self, Parallelism};
use crate::product::ProductGame;
use crate::Cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Inner,
    Accepting,
    /// Non-accepting robot state with no moves.
    DeadEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UNode {
    pub state: usize,
    pub u: u32,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UEdge {
    /// Index into `p.edges(node.state)`.
    pub edge: usize,
    pub cost: u32,
    /// Product state the edge leads to, whether or not it fits the budget.
    pub state: usize,
    /// `None` when `u + cost` exceeds the budget.
    pub target: Option<usize>,
}

/// Budget-bounded unfolding of a product game. Nodes are `(state, u)` pairs
/// with `u <= budget`; node 0 is `(s0, 0)`.
#[derive(Debug, Clone)]
pub struct UtilityGraph {
    pub budget: u32,
    pub nodes: Vec<UNode>,
    pub edges: Vec<Vec<UEdge>>,
    owners: Vec<Owner>,
}

impl UtilityGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn owner(&self, n: usize) -> Owner {
        self.owners[n]
    }

    /// Node ids in an order where every edge goes forward: by utility, with
    /// human nodes before robot nodes of the same utility.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&n| (self.nodes[n].u, rank(self.owners[n]), n));
        order
    }
}

fn rank(o: Owner) -> u8 {
    match o {
        // human edges keep u and lead to robot states
        Owner::Human => 0,
        Owner::Robot => 1,
    }
}

/// Unfolds `p` from `(s0, 0)` up to utility `budget`.
pub fn unfold_utility(p: &ProductGame, budget: u32, node_cap: usize) -> Result<UtilityGraph, RegretError> {
    let mut index: HashMap<(usize, u32), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut edges: Vec<Vec<UEdge>> = Vec::new();
    let mut stack = Vec::new();

    let kind_of = |s: usize| {
        if p.is_accepting(s) {
            NodeKind::Accepting
        } else if p.edges(s).is_empty() {
            NodeKind::DeadEnd
        } else {
            NodeKind::Inner
        }
    };
    index.insert((p.init(), 0), 0);
    nodes.push(UNode {
        state: p.init(),
        u: 0,
        kind: kind_of(p.init()),
    });
    edges.push(Vec::new());
    stack.push(0usize);

    while let Some(n) = stack.pop() {
        let UNode { state, u, kind } = nodes[n];
        if kind != NodeKind::Inner {
            continue;
        }
        let mut out = Vec::with_capacity(p.edges(state).len());
        for (i, e) in p.edges(state).iter().enumerate() {
            let u2 = u + e.cost;
            let target = if u2 > budget {
                None
            } else {
                let fresh = nodes.len();
                let id = *index.entry((e.target, u2)).or_insert(fresh);
                if id == fresh {
                    if fresh >= node_cap {
                        return Err(RegretError::NodeBudget {
                            graph: "utility",
                            cap: node_cap,
                        });
                    }
                    nodes.push(UNode {
                        state: e.target,
                        u: u2,
                        kind: kind_of(e.target),
                    });
                    edges.push(Vec::new());
                    stack.push(id);
                }
                Some(id)
            };
            out.push(UEdge {
                edge: i,
                cost: e.cost,
                state: e.target,
                target,
            });
        }
        edges[n] = out;
    }

    let owners = nodes.iter().map(|n| p.owner(n.state)).collect();
    Ok(UtilityGraph {
        budget,
        nodes,
        edges,
        owners,
    })
}

/// Best-alternate values per edge: `ba[n][i]` for the `i`-th edge of robot
/// node `n` is the cheapest cooperative completion through any sibling edge,
/// `u + cost + coop(target)`. Human edges and single-choice nodes get
/// `Infinite`. With `budgeted`, alternatives above the budget count as
/// `Infinite` too.
pub fn compute_ba(
    gu: &UtilityGraph,
    coop: &[Cost],
    budgeted: bool,
    mode: Parallelism,
) -> Vec<Vec<Cost>> {
    par::map_range(mode, gu.num_nodes(), |n| {
        let out = &gu.edges[n];
        if gu.owner(n) != Owner::Robot {
            return vec![Cost::Infinite; out.len()];
        }
        let u = gu.nodes[n].u;
        let through: Vec<Cost> = out
            .iter()
            .map(|e| {
                let c = coop[e.state] + (u + e.cost);
                if budgeted {
                    c.within(gu.budget)
                } else {
                    c
                }
            })
            .collect();
        // min over all siblings but one, from the two smallest
        let (mut best, mut second) = (Cost::Infinite, Cost::Infinite);
        let mut best_at = usize::MAX;
        for (i, &c) in through.iter().enumerate() {
            if c < best {
                second = best;
                best = c;
                best_at = i;
            } else if c < second {
                second = c;
            }
        }
        (0..out.len())
            .map(|i| if i == best_at { second } else { best })
            .collect()
    })
}
