//! Seeded generators of small games, formulas and traces for tests and
//! benchmarks.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::Rng;

use crate::game::{EdgeSpec, GameGraph, GameState, Owner};
use crate::ltlf::{Formula, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameShape {
    /// Total states; at least 2.
    pub states: usize,
    /// Atoms `p0`, `p1`, ...
    pub props: usize,
    /// Robot edges per state, drawn from `0..=max_robot_moves`.
    pub max_robot_moves: usize,
    /// Human edges per state, drawn from `1..=max_human_moves`.
    pub max_human_moves: usize,
    pub max_cost: u32,
}

impl Default for GameShape {
    fn default() -> Self {
        GameShape {
            states: 8,
            props: 2,
            max_robot_moves: 3,
            max_human_moves: 2,
            max_cost: 3,
        }
    }
}

pub fn atoms(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// A valid alternating game. State 0 is the robot-owned initial state.
pub fn random_game<R: Rng>(rng: &mut R, shape: GameShape) -> GameGraph {
    let n = shape.states.max(2);
    let props = atoms(shape.props);
    let mut owners: Vec<Owner> = (0..n)
        .map(|_| if rng.random_bool(0.5) { Owner::Robot } else { Owner::Human })
        .collect();
    owners[0] = Owner::Robot;
    if !owners.contains(&Owner::Human) {
        owners[n - 1] = Owner::Human;
    }
    let robots: Vec<usize> = (0..n).filter(|&i| owners[i] == Owner::Robot).collect();
    let humans: Vec<usize> = (0..n).filter(|&i| owners[i] == Owner::Human).collect();
    let states: Vec<GameState> = (0..n)
        .map(|i| GameState {
            id: format!("v{i}"),
            owner: owners[i],
            labels: props.iter().filter(|_| rng.random_bool(0.5)).cloned().collect(),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let (targets, k, prefix) = match owners[i] {
            Owner::Robot => (&humans, rng.random_range(0..=shape.max_robot_moves), "r"),
            Owner::Human => (&robots, rng.random_range(1..=shape.max_human_moves.max(1)), "h"),
        };
        for a in 0..k {
            let to = targets[rng.random_range(0..targets.len())];
            let cost = match owners[i] {
                Owner::Robot => rng.random_range(1..=shape.max_cost.max(1)),
                Owner::Human => 0,
            };
            edges.push(EdgeSpec {
                from: format!("v{i}"),
                action: format!("{prefix}{a}"),
                to: format!("v{to}"),
                cost,
            });
        }
    }
    GameGraph::new(props.into_iter().collect(), states, "v0", edges).expect("generated game is valid")
}

/// A formula of at most `depth` operator levels over `atoms`, using every
/// LTLf connective.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.random_range(0..4) == 0 {
        return match rng.random_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(atoms[rng.random_range(0..atoms.len())].clone()),
        };
    }
    let sub = |rng: &mut R| random_formula(rng, atoms, depth - 1);
    match rng.random_range(0..11) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::next(sub(rng)),
        5 => Formula::weak_next(sub(rng)),
        6 => Formula::until(sub(rng), sub(rng)),
        7 => Formula::release(sub(rng), sub(rng)),
        8 => Formula::eventually(sub(rng)),
        9 => Formula::globally(sub(rng)),
        _ => Formula::atom(atoms[rng.random_range(0..atoms.len())].clone()),
    }
}

/// A trace over `atoms` with a length drawn from `lens`.
pub fn random_trace<R: Rng>(rng: &mut R, atoms: &[String], lens: RangeInclusive<usize>) -> Vec<Letter> {
    let len = rng.random_range(lens);
    (0..len)
        .map(|_| {
            let set: BTreeSet<String> = atoms.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
            Letter(set)
        })
        .collect()
}
