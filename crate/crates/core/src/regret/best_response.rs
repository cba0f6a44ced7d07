use std::collections::HashMap;

use super::utility::{NodeKind, UtilityGraph};
use super::RegretError;
use crate::game::Owner;
use crate::Cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrNode {
    /// Node of the utility graph.
    pub unode: usize,
    /// Running minimum of best-alternate values along the history.
    pub b: Cost,
}

/// The utility graph refined by the running BA minimum `b`. Node 0 is
/// `(root, Infinite)`. `edges[n][i]` mirrors the `i`-th utility edge and is
/// `None` when that edge overshoots the budget.
#[derive(Debug, Clone)]
pub struct BestResponseGraph {
    pub nodes: Vec<BrNode>,
    pub edges: Vec<Vec<Option<usize>>>,
}

impl BestResponseGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }
}

pub fn build_best_response_graph(
    gu: &UtilityGraph,
    ba: &[Vec<Cost>],
    node_cap: usize,
) -> Result<BestResponseGraph, RegretError> {
    let mut index: HashMap<(usize, Cost), usize> = HashMap::new();
    let mut nodes = vec![BrNode {
        unode: 0,
        b: Cost::Infinite,
    }];
    let mut edges: Vec<Vec<Option<usize>>> = vec![Vec::new()];
    index.insert((0, Cost::Infinite), 0);
    let mut stack = vec![0usize];

    while let Some(n) = stack.pop() {
        let BrNode { unode, b } = nodes[n];
        let robot = gu.owner(unode) == Owner::Robot;
        let mut out = Vec::with_capacity(gu.edges[unode].len());
        for (i, e) in gu.edges[unode].iter().enumerate() {
            let Some(t) = e.target else {
                out.push(None);
                continue;
            };
            let b2 = if robot { b.min(ba[unode][i]) } else { b };
            let fresh = nodes.len();
            let id = *index.entry((t, b2)).or_insert(fresh);
            if id == fresh {
                if fresh >= node_cap {
                    return Err(RegretError::NodeBudget {
                        graph: "best-response",
                        cap: node_cap,
                    });
                }
                nodes.push(BrNode { unode: t, b: b2 });
                edges.push(Vec::new());
                stack.push(id);
            }
            out.push(Some(id));
        }
        edges[n] = out;
    }
    Ok(BestResponseGraph { nodes, edges })
}

/// Regret value of every node: leaves first, then one backward sweep in
/// reverse topological order with robot nodes minimizing and human nodes
/// maximizing.
pub fn backward_values(gu: &UtilityGraph, gbr: &BestResponseGraph) -> Vec<Cost> {
    let mut pos = vec![0usize; gu.num_nodes()];
    for (i, n) in gu.topological_order().into_iter().enumerate() {
        pos[n] = i;
    }
    let mut order: Vec<usize> = (0..gbr.num_nodes()).collect();
    order.sort_by_key(|&n| std::cmp::Reverse(pos[gbr.nodes[n].unode]));

    let mut values = vec![Cost::Infinite; gbr.num_nodes()];
    for n in order {
        let BrNode { unode, b } = gbr.nodes[n];
        let node = &gu.nodes[unode];
        values[n] = match node.kind {
            NodeKind::Accepting => Cost::Finite(node.u).saturating_sub(b),
            NodeKind::DeadEnd => Cost::Infinite,
            NodeKind::Inner => {
                let it = gbr.edges[n]
                    .iter()
                    .map(|t| t.map_or(Cost::Infinite, |t| values[t]));
                match gu.owner(unode) {
                    Owner::Robot => it.min().unwrap_or(Cost::Infinite),
                    Owner::Human => it.max().unwrap_or(Cost::Infinite),
                }
            }
        };
    }
    values
}

/// Index of the first edge of robot node `n` attaining its value. Edges are
/// in action order, which gives the lexicographic tie-break.
pub fn best_edge(gbr: &BestResponseGraph, values: &[Cost], n: usize) -> Option<usize> {
    if !values[n].is_finite() {
        return None;
    }
    gbr.edges[n]
        .iter()
        .position(|t| t.map_or(Cost::Infinite, |t| values[t]) == values[n])
}
