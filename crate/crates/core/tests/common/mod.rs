#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use regsynth_core::game::{toy_game, GameGraph, ARCH_FORMULA};
use regsynth_core::ltlf::{build_dfa, parse, Formula};
use regsynth_core::product::{compose, ProductConfig, ProductGame};
use regsynth_core::random::{atoms, random_formula, random_game, GameShape};

pub fn toy() -> ProductGame {
    let g = toy_game();
    let dfa = build_dfa(&parse(ARCH_FORMULA, g.props()).unwrap(), g.props()).unwrap();
    compose(&g, &dfa, ProductConfig::default()).unwrap()
}

pub fn props_of(n: usize) -> BTreeSet<String> {
    atoms(n).into_iter().collect()
}

/// A random game, a random formula over its atoms and their product.
pub fn random_product<R: Rng>(rng: &mut R, shape: GameShape) -> (GameGraph, Formula, ProductGame) {
    let g = random_game(rng, shape);
    let f = random_formula(rng, &atoms(shape.props), 3);
    let dfa = build_dfa(&f, g.props()).unwrap();
    let p = compose(&g, &dfa, ProductConfig::default()).unwrap();
    (g, f, p)
}
