//! Definition-level regret evaluation by exhaustive strategy enumeration.
//! Only usable on tiny games; it is the reference the pipeline is checked
//! against.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::RegretError;
use crate::game::Owner;
use crate::product::ProductGame;
use crate::Cost;

/// Default limit on `|robot strategies| * |human strategies|`.
pub const DEFAULT_ORACLE_LIMIT: u64 = 4_000_000;

enum TNode {
    Leaf(Cost),
    Choice { robot: bool, children: Vec<usize> },
}

struct Tree {
    nodes: Vec<TNode>,
    robot: Vec<usize>,
    human: Vec<usize>,
}

fn unfold_tree(p: &ProductGame, budget: u32, node_limit: usize) -> Result<Tree, RegretError> {
    let mut tree = Tree {
        nodes: Vec::new(),
        robot: Vec::new(),
        human: Vec::new(),
    };
    grow(p, budget, p.init(), 0, &mut tree, node_limit)?;
    Ok(tree)
}

fn grow(p: &ProductGame, budget: u32, s: usize, u: u32, t: &mut Tree, limit: usize) -> Result<usize, RegretError> {
    if t.nodes.len() >= limit {
        return Err(RegretError::OracleTooLarge {
            what: "history tree",
            size: t.nodes.len() as u64,
            limit: limit as u64,
        });
    }
    let id = t.nodes.len();
    if p.is_accepting(s) {
        t.nodes.push(TNode::Leaf(Cost::Finite(u)));
        return Ok(id);
    }
    if p.edges(s).is_empty() {
        t.nodes.push(TNode::Leaf(Cost::Infinite));
        return Ok(id);
    }
    let robot = p.owner(s) == Owner::Robot;
    t.nodes.push(TNode::Choice {
        robot,
        children: Vec::new(),
    });
    if robot {
        t.robot.push(id);
    } else {
        t.human.push(id);
    }
    let mut children = Vec::new();
    for e in p.edges(s) {
        let u2 = u + e.cost;
        let c = if u2 > budget {
            t.nodes.push(TNode::Leaf(Cost::Infinite));
            t.nodes.len() - 1
        } else {
            grow(p, budget, e.target, u2, t, limit)?
        };
        children.push(c);
    }
    if let TNode::Choice { children: slot, .. } = &mut t.nodes[id] {
        *slot = children;
    }
    Ok(id)
}

fn degree(t: &Tree, n: usize) -> usize {
    match &t.nodes[n] {
        TNode::Choice { children, .. } => children.len(),
        TNode::Leaf(_) => 0,
    }
}

/// Mixed-radix counter over per-node choices.
fn advance(choice: &mut [usize], radix: &[usize]) -> bool {
    for (c, &r) in choice.iter_mut().zip(radix) {
        *c += 1;
        if *c < r {
            return true;
        }
        *c = 0;
    }
    false
}

fn count(radix: &[usize]) -> u64 {
    radix.iter().fold(1u64, |acc, &r| acc.saturating_mul(r as u64))
}

/// `min_sigma max_tau (Val(sigma, tau) - min_sigma' Val(sigma', tau))` with
/// strategies enumerated as choice functions on the history tree truncated
/// at the budget. Plays of `sigma` that fail or overshoot have `Val = inf`.
pub fn brute_force_regret(p: &ProductGame, budget: u32, limit: u64) -> Result<Cost, RegretError> {
    let tree = unfold_tree(p, budget, 200_000)?;
    let r_radix: Vec<usize> = tree.robot.iter().map(|&n| degree(&tree, n)).collect();
    let h_radix: Vec<usize> = tree.human.iter().map(|&n| degree(&tree, n)).collect();
    let pairs = count(&r_radix).saturating_mul(count(&h_radix));
    if pairs > limit {
        return Err(RegretError::OracleTooLarge {
            what: "strategy pairs",
            size: pairs,
            limit,
        });
    }

    // slot of each choice node within its player's choice vector
    let mut slot = vec![usize::MAX; tree.nodes.len()];
    for (i, &n) in tree.robot.iter().enumerate() {
        slot[n] = i;
    }
    for (i, &n) in tree.human.iter().enumerate() {
        slot[n] = i;
    }

    // enumerate human strategies in the outer loop so each best response
    // is computed once
    let mut taus = Vec::new();
    let mut tau = vec![0usize; h_radix.len()];
    loop {
        taus.push(tau.clone());
        if !advance(&mut tau, &h_radix) {
            break;
        }
    }
    let best: Vec<Cost> = taus.iter().map(|tau| best_response(&tree, &slot, tau)).collect();

    let mut answer = Cost::Infinite;
    let mut sigma = vec![0usize; r_radix.len()];
    loop {
        let mut worst = Cost::ZERO;
        for (tau, &br) in taus.iter().zip(&best) {
            let val = play(&tree, &slot, &sigma, tau);
            let regret = if val.is_finite() {
                val.saturating_sub(br)
            } else {
                Cost::Infinite
            };
            worst = worst.max(regret);
            if worst >= answer {
                break;
            }
        }
        answer = answer.min(worst);
        if !advance(&mut sigma, &r_radix) {
            break;
        }
    }
    Ok(answer)
}

fn play(t: &Tree, slot: &[usize], sigma: &[usize], tau: &[usize]) -> Cost {
    let mut n = 0;
    loop {
        match &t.nodes[n] {
            TNode::Leaf(v) => return *v,
            TNode::Choice { robot, children } => {
                let pick = if *robot { sigma[slot[n]] } else { tau[slot[n]] };
                n = children[pick];
            }
        }
    }
}

fn best_response(t: &Tree, slot: &[usize], tau: &[usize]) -> Cost {
    fn go(t: &Tree, slot: &[usize], tau: &[usize], n: usize) -> Cost {
        match &t.nodes[n] {
            TNode::Leaf(v) => *v,
            TNode::Choice { robot: true, children } => children
                .iter()
                .map(|&c| go(t, slot, tau, c))
                .min()
                .unwrap_or(Cost::Infinite),
            TNode::Choice { robot: false, children } => go(t, slot, tau, children[tau[slot[n]]]),
        }
    }
    go(t, slot, tau, 0)
}

/// Regret of memoryless robot strategies against "uniform" human
/// strategies that play one fixed action wherever it is available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessTable {
    /// Robot product states on which the rows differ.
    pub robot_states: Vec<usize>,
    /// Per row, the action taken at each of `robot_states`.
    pub rows: Vec<Vec<String>>,
    /// Human action played by each column's strategy.
    pub columns: Vec<String>,
    pub cells: Vec<Vec<Cost>>,
}

pub fn memoryless_table(p: &ProductGame, budget: u32, limit: u64) -> Result<MemorylessTable, RegretError> {
    let reach = reachable(p);
    let robot_states: Vec<usize> = (0..p.num_states())
        .filter(|&s| reach[s] && p.owner(s) == Owner::Robot && !p.is_accepting(s) && !p.edges(s).is_empty())
        .collect();
    let radix: Vec<usize> = robot_states.iter().map(|&s| p.edges(s).len()).collect();
    if count(&radix) > limit {
        return Err(RegretError::OracleTooLarge {
            what: "memoryless robot strategies",
            size: count(&radix),
            limit,
        });
    }
    let mut columns: Vec<String> = (0..p.num_states())
        .filter(|&s| p.owner(s) == Owner::Human && !p.is_accepting(s))
        .flat_map(|s| p.edges(s).iter().map(|e| e.action.clone()))
        .collect();
    columns.sort();
    columns.dedup();

    let mut pick = vec![usize::MAX; p.num_states()];
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut cells = Vec::new();
    let mut sigma = vec![0usize; radix.len()];
    loop {
        for (i, &s) in robot_states.iter().enumerate() {
            pick[s] = sigma[i];
        }
        rows.push(
            robot_states
                .iter()
                .zip(&sigma)
                .map(|(&s, &i)| p.edges(s)[i].action.clone())
                .collect(),
        );
        let mut row = Vec::new();
        for a in &columns {
            let tau = |s: usize| p.edges(s).iter().position(|e| &e.action == a).unwrap_or(0);
            let val = memoryless_play(p, budget, &pick, &tau);
            let br = tau_best_response(p, budget, &tau);
            row.push(if val.is_finite() { val.saturating_sub(br) } else { Cost::Infinite });
        }
        cells.push(row);
        if !advance(&mut sigma, &radix) {
            break;
        }
    }
    // first robot state varies slowest in row order
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].cmp(&rows[b]));
    Ok(MemorylessTable {
        robot_states,
        rows: order.iter().map(|&i| rows[i].clone()).collect(),
        columns,
        cells: order.iter().map(|&i| cells[i].clone()).collect(),
    })
}

fn reachable(p: &ProductGame) -> Vec<bool> {
    let mut seen = vec![false; p.num_states()];
    let mut stack = vec![p.init()];
    seen[p.init()] = true;
    while let Some(s) = stack.pop() {
        for e in p.edges(s) {
            if !seen[e.target] {
                seen[e.target] = true;
                stack.push(e.target);
            }
        }
    }
    seen
}

fn memoryless_play(p: &ProductGame, budget: u32, pick: &[usize], tau: &dyn Fn(usize) -> usize) -> Cost {
    let mut visited = vec![false; p.num_states()];
    let (mut s, mut u) = (p.init(), 0u32);
    loop {
        if p.is_accepting(s) {
            return Cost::Finite(u).within(budget);
        }
        if visited[s] || p.edges(s).is_empty() || u > budget {
            return Cost::Infinite;
        }
        visited[s] = true;
        let i = match p.owner(s) {
            Owner::Robot => pick[s],
            Owner::Human => tau(s),
        };
        let e = &p.edges(s)[i];
        u += e.cost;
        s = e.target;
    }
}

/// Cheapest completion when the robot may use any strategy and the human
/// follows `tau`.
fn tau_best_response(p: &ProductGame, budget: u32, tau: &dyn Fn(usize) -> usize) -> Cost {
    let mut dist = vec![Cost::Infinite; p.num_states()];
    let mut heap = BinaryHeap::from([Reverse((0u32, p.init()))]);
    dist[p.init()] = Cost::ZERO;
    while let Some(Reverse((d, s))) = heap.pop() {
        if dist[s] != Cost::Finite(d) {
            continue;
        }
        if p.is_accepting(s) {
            return Cost::Finite(d).within(budget);
        }
        let edges = p.edges(s);
        let allowed: Vec<usize> = match p.owner(s) {
            Owner::Robot => (0..edges.len()).collect(),
            Owner::Human => vec![tau(s)],
        };
        for i in allowed {
            let e = &edges[i];
            let nd = d + e.cost;
            if Cost::Finite(nd) < dist[e.target] {
                dist[e.target] = Cost::Finite(nd);
                heap.push(Reverse((nd, e.target)));
            }
        }
    }
    Cost::Infinite
}
