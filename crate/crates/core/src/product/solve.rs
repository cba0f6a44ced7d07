use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::ProductGame;
use crate::game::Owner;
use crate::Cost;

/// Min-max reachability values and a memoryless robot strategy attaining
/// them. `strategy[s]` is the index into `p.edges(s)` for robot states with
/// a finite value and `None` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarialSolution {
    pub values: Vec<Cost>,
    pub strategy: Vec<Option<usize>>,
}

impl AdversarialSolution {
    /// `W(s0)`, the smallest budget under which completion can be forced.
    pub fn min_budget(&self) -> Cost {
        self.values[0]
    }
}

fn predecessors(p: &ProductGame) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); p.num_states()];
    for s in 0..p.num_states() {
        if p.is_accepting(s) {
            continue;
        }
        for e in p.edges(s) {
            pred[e.target].push(s);
        }
    }
    pred
}

/// Least total cost from each state to an accepting state when both players
/// minimize. Reverse Dijkstra from the accepting set.
pub fn coop_values(p: &ProductGame) -> Vec<Cost> {
    let n = p.num_states();
    let mut rev: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for s in 0..n {
        if p.is_accepting(s) {
            continue;
        }
        for e in p.edges(s) {
            rev[e.target].push((s, e.cost));
        }
    }
    let mut dist = vec![Cost::Infinite; n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        if p.is_accepting(s) {
            dist[s] = Cost::ZERO;
            heap.push(Reverse((0u32, s)));
        }
    }
    while let Some(Reverse((d, s))) = heap.pop() {
        if dist[s] != Cost::Finite(d) {
            continue;
        }
        for &(t, c) in &rev[s] {
            let nd = d + c;
            if Cost::Finite(nd) < dist[t] {
                dist[t] = Cost::Finite(nd);
                heap.push(Reverse((nd, t)));
            }
        }
    }
    dist
}

fn local_value(p: &ProductGame, values: &[Cost], s: usize) -> Cost {
    if p.is_accepting(s) {
        return Cost::ZERO;
    }
    let it = p.edges(s).iter().map(|e| values[e.target] + e.cost);
    match p.owner(s) {
        Owner::Robot => it.min().unwrap_or(Cost::Infinite),
        Owner::Human => it.max().unwrap_or(Cost::Infinite),
    }
}

/// Min-max reachability cost: the robot minimizes, the human maximizes.
///
/// Worklist iteration from `Infinite` everywhere except the accepting set.
/// Values only decrease and are integers, so the iteration stops; every
/// cycle outside the accepting set costs at least 1, so the fixpoint is the
/// game value.
pub fn adversarial_values(p: &ProductGame) -> AdversarialSolution {
    let n = p.num_states();
    let pred = predecessors(p);
    let mut values = vec![Cost::Infinite; n];
    let mut queued = vec![false; n];
    let mut work = VecDeque::new();
    for s in 0..n {
        if p.is_accepting(s) {
            values[s] = Cost::ZERO;
            for &q in &pred[s] {
                if !queued[q] {
                    queued[q] = true;
                    work.push_back(q);
                }
            }
        }
    }
    while let Some(s) = work.pop_front() {
        queued[s] = false;
        let v = local_value(p, &values, s);
        if v < values[s] {
            values[s] = v;
            for &q in &pred[s] {
                if !queued[q] {
                    queued[q] = true;
                    work.push_back(q);
                }
            }
        }
    }

    let strategy = (0..n)
        .map(|s| {
            if p.is_accepting(s) || p.owner(s) != Owner::Robot || !values[s].is_finite() {
                return None;
            }
            // edges are in action order, so the first minimizer is the
            // lexicographically smallest action
            p.edges(s)
                .iter()
                .position(|e| values[e.target] + e.cost == values[s])
        })
        .collect();
    AdversarialSolution { values, strategy }
}
