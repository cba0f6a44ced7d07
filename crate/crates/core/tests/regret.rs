mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regsynth_core::execution::Play;
use regsynth_core::game::{Owner, ARCH_FORMULA};
use regsynth_core::par::Parallelism;
use regsynth_core::product::{adversarial_values, compose, coop_values, ProductConfig, ProductGame};
use regsynth_core::ltlf::{build_dfa, parse};
use regsynth_core::random::{atoms, random_formula, random_game, GameShape};
use regsynth_core::regret::{
    brute_force_regret, compute_ba, solve, sweep_budgets, synthesize, NodeKind, RegretError, RegretStrategy,
    SynthConfig,
};
use regsynth_core::Cost;

use common::{random_product, toy};

fn shape<R: Rng>(rng: &mut R) -> GameShape {
    GameShape {
        states: rng.random_range(3..=6),
        props: 2,
        max_robot_moves: 2,
        max_human_moves: 2,
        max_cost: 3,
    }
}

/// A random product with at most `max_states` states.
fn small_product<R: Rng>(rng: &mut R, max_states: usize) -> ProductGame {
    loop {
        let s = shape(rng);
        let (_, _, p) = random_product(rng, s);
        if p.num_states() <= max_states {
            return p;
        }
    }
}

/// Distinct `(state, u)` pairs reachable with `u <= budget`, never leaving
/// accepting states.
fn reachable_state_utilities(p: &ProductGame, budget: u32) -> usize {
    let mut seen = HashSet::from([(0usize, 0u32)]);
    let mut stack = vec![(0usize, 0u32)];
    while let Some((s, u)) = stack.pop() {
        if p.is_accepting(s) {
            continue;
        }
        for e in p.edges(s) {
            let next = (e.target, u + e.cost);
            if next.1 <= budget && seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len()
}

/// Walks every human behavior against `s` and returns the final plays.
fn all_plays(s: &RegretStrategy, p: &ProductGame) -> Vec<Play> {
    let mut done = Vec::new();
    let mut stack = vec![Play::new(s, p).unwrap()];
    while let Some(mut play) = stack.pop() {
        assert!(play.trace.steps.len() <= s.stats.best_response_nodes + 1, "play does not terminate");
        if play.state.done {
            done.push(play);
            continue;
        }
        match play.state.turn {
            Owner::Robot => {
                play.robot(s, p).unwrap();
                stack.push(play);
            }
            Owner::Human => {
                for a in regsynth_core::execution::legal_actions(p, &play.state) {
                    let mut next = play.clone();
                    next.human(p, &a).unwrap();
                    stack.push(next);
                }
            }
        }
    }
    done
}

#[test]
fn toy_accepting_leaves() {
    let p = toy();
    let solved = solve(&p, 7, SynthConfig::default()).unwrap();
    let leaves: BTreeSet<(u32, Cost, Cost)> = solved
        .accepting_leaves()
        .into_iter()
        .map(|(_, u, b, r)| (u, b, r))
        .collect();
    let f = Cost::Finite;
    for want in [(1, f(5), f(0)), (7, f(5), f(2)), (5, f(1), f(4))] {
        assert!(leaves.contains(&want), "missing leaf {want:?} in {leaves:?}");
    }
    assert_eq!(solved.root_value(), f(2));
}

#[test]
fn single_choice_nodes_have_no_alternative() {
    let p = toy();
    let solved = solve(&p, 7, SynthConfig::default()).unwrap();
    for n in 0..solved.gu.num_nodes() {
        if solved.gu.owner(n) == Owner::Robot && solved.gu.edges[n].len() == 1 {
            assert_eq!(solved.ba[n], vec![Cost::Infinite]);
        }
    }
}

#[test]
fn toy_below_minimal_budget_is_infeasible() {
    let p = toy();
    let err = synthesize(&p, 4, ARCH_FORMULA, SynthConfig::default()).unwrap_err();
    assert_eq!(
        err,
        RegretError::Infeasible {
            budget: 4,
            min_budget: Cost::Finite(5)
        }
    );
}

/// A product with at most `max_states` states for the oracle comparison.
/// Uniformly random formulas rarely give positive regret, so reachability
/// tasks are mixed in.
fn oracle_sample<R: Rng>(rng: &mut R, max_states: usize) -> Option<ProductGame> {
    let shape = GameShape {
        states: rng.random_range(3..=10),
        props: 2,
        max_robot_moves: 3,
        max_human_moves: 3,
        max_cost: 5,
    };
    let g = random_game(rng, shape);
    let f = match rng.random_range(0..5) {
        0 => random_formula(rng, &atoms(2), 3),
        1 => parse("F p0", g.props()).unwrap(),
        2 => parse("F p0 & F p1", g.props()).unwrap(),
        3 => parse("F (p0 & p1)", g.props()).unwrap(),
        _ => parse("F (p0 & X p1)", g.props()).unwrap(),
    };
    let dfa = build_dfa(&f, g.props()).unwrap();
    let p = compose(&g, &dfa, ProductConfig::default()).unwrap();
    (p.num_states() <= max_states).then_some(p)
}

/// Compares the pipeline with the brute-force oracle until `min_compared`
/// samples and `min_positive` samples with positive regret agree.
/// Returns `(compared, feasible, positive)`.
fn compare_with_oracle(seed: u64, max_states: usize, min_compared: usize, min_positive: usize) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut compared, mut finite, mut positive) = (0, 0, 0);
    while compared < min_compared || positive < min_positive {
        assert!(compared < 50_000, "only {positive} samples with positive regret");
        let Some(p) = oracle_sample(&mut rng, max_states) else { continue };
        let budget = rng.random_range(0..=12);
        let want = match brute_force_regret(&p, budget, 300_000) {
            Ok(v) => v,
            Err(RegretError::OracleTooLarge { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let got = solve(&p, budget, SynthConfig::default()).unwrap().root_value();
        assert_eq!(got, want, "budget {budget}, product\n{}", p.to_dot());
        let budgeted = SynthConfig {
            budgeted_ba: true,
            ..SynthConfig::default()
        };
        assert_eq!(solve(&p, budget, budgeted).unwrap().root_value(), want);
        compared += 1;
        finite += want.is_finite() as usize;
        positive += (want.is_finite() && want > 0) as usize;
    }
    (compared, finite, positive)
}

#[test]
fn pipeline_matches_brute_force_on_small_products() {
    let (compared, finite, positive) = compare_with_oracle(1234, 8, 200, 0);
    eprintln!("compared {compared}, feasible {finite}, positive regret {positive}");
    assert!(finite >= 40);
}

#[test]
fn pipeline_matches_brute_force_where_regret_is_positive() {
    let (compared, _, positive) = compare_with_oracle(99, 16, 200, 20);
    eprintln!("compared {compared}, positive regret {positive}");
}

#[test]
fn strategy_guarantees_completion_and_regret_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    while checked < 60 {
        let p = small_product(&mut rng, 12);
        let budget = rng.random_range(3..=12);
        let Ok(s) = synthesize(&p, budget, "", SynthConfig::default()) else { continue };
        for play in all_plays(&s, &p) {
            assert!(play.trace.satisfied);
            assert!(play.trace.payoff <= budget);
            assert!(play.trace.regret <= s.root_regret);
        }
        checked += 1;
    }
}

#[test]
fn finite_root_iff_budget_covers_min_max_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let p = small_product(&mut rng, 16);
        let budget = rng.random_range(0..=12);
        let w = adversarial_values(&p).min_budget();
        let root = solve(&p, budget, SynthConfig::default()).unwrap().root_value();
        assert_eq!(root.is_finite(), w <= budget, "W = {w}, B = {budget}");
    }
}

#[test]
fn values_lie_between_zero_and_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let p = small_product(&mut rng, 16);
        let budget = rng.random_range(0..=12);
        let solved = solve(&p, budget, SynthConfig::default()).unwrap();
        for v in &solved.values {
            assert!(!v.is_finite() || *v <= budget, "{v} > {budget}");
        }
    }
}

#[test]
fn utility_graph_has_one_node_per_reachable_state_and_utility() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let p = small_product(&mut rng, 16);
        let budget = rng.random_range(0..=12);
        let solved = solve(&p, budget, SynthConfig::default()).unwrap();
        assert_eq!(solved.gu.num_nodes(), reachable_state_utilities(&p, budget));
        assert!(solved.gbr.num_nodes() >= solved.gu.num_nodes());
        for (n, node) in solved.gu.nodes.iter().enumerate() {
            let kind = if p.is_accepting(node.state) {
                NodeKind::Accepting
            } else if p.edges(node.state).is_empty() {
                NodeKind::DeadEnd
            } else {
                NodeKind::Inner
            };
            assert_eq!(node.kind, kind, "node {n}");
        }
    }
}

/// `ba[n][i]` is the cheapest cooperative completion through a sibling of
/// edge `i`, found here by a shortest-path search from each sibling target.
#[test]
fn best_alternates_match_sibling_shortest_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..60 {
        let p = small_product(&mut rng, 16);
        let budget = rng.random_range(0..=12);
        let solved = solve(&p, budget, SynthConfig::default()).unwrap();
        let dist = |from: usize| -> Cost {
            // Dijkstra-free: relax until stable
            let n = p.num_states();
            let mut d = vec![Cost::Infinite; n];
            for s in 0..n {
                if p.is_accepting(s) {
                    d[s] = Cost::ZERO;
                }
            }
            let mut changed = true;
            while changed {
                changed = false;
                for s in 0..n {
                    if p.is_accepting(s) {
                        continue;
                    }
                    for e in p.edges(s) {
                        let c = d[e.target] + e.cost;
                        if c < d[s] {
                            d[s] = c;
                            changed = true;
                        }
                    }
                }
            }
            d[from]
        };
        for (n, node) in solved.gu.nodes.iter().enumerate() {
            if solved.gu.owner(n) != Owner::Robot {
                continue;
            }
            let out = &solved.gu.edges[n];
            for i in 0..out.len() {
                let want = (0..out.len())
                    .filter(|&j| j != i)
                    .map(|j| dist(out[j].state) + (node.u + out[j].cost))
                    .min()
                    .unwrap_or(Cost::Infinite);
                assert_eq!(solved.ba[n][i], want);
            }
        }
    }
}

#[test]
fn strategy_file_round_trip_on_random_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut done = 0;
    while done < 20 {
        let p = small_product(&mut rng, 16);
        let Ok(s) = synthesize(&p, 10, "F p0", SynthConfig::default()) else { continue };
        let back = RegretStrategy::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        for row in &s.rows {
            assert_eq!(back.lookup(row.state, row.u, row.b), Some(row));
        }
        done += 1;
    }
}

#[test]
fn malformed_strategy_file_is_rejected() {
    assert!(matches!(
        RegretStrategy::from_json("{\"budget\": 3}"),
        Err(RegretError::StrategyFile(_))
    ));
}

#[test]
fn parallel_and_sequential_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..20 {
        let p = small_product(&mut rng, 16);
        let par = SynthConfig::default();
        let seq = SynthConfig {
            parallelism: Parallelism::Sequential,
            ..par
        };
        let a = solve(&p, 12, par).unwrap();
        let b = solve(&p, 12, seq).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.ba, b.ba);
        let coop = coop_values(&p);
        assert_eq!(
            compute_ba(&a.gu, &coop, false, Parallelism::Parallel),
            compute_ba(&a.gu, &coop, false, Parallelism::Sequential)
        );
        let budgets = [0, 3, 6, 9, 12];
        let strip = |r: Vec<Result<regsynth_core::regret::SynthStats, RegretError>>| {
            r.into_iter()
                .map(|s| s.map(|s| (s.utility_nodes, s.best_response_nodes, s.root_regret)))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(sweep_budgets(&p, &budgets, par)), strip(sweep_budgets(&p, &budgets, seq)));
    }
}

#[test]
fn node_cap_is_reported() {
    let p = toy();
    let cfg = SynthConfig {
        node_cap: 2,
        ..SynthConfig::default()
    };
    assert!(matches!(solve(&p, 7, cfg), Err(RegretError::NodeBudget { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn more_budget_never_increases_regret(seed in any::<u64>(), budget in 0u32..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = small_product(&mut rng, 16);
        let lo = solve(&p, budget, SynthConfig::default()).unwrap().root_value();
        let hi = solve(&p, budget + 1, SynthConfig::default()).unwrap().root_value();
        prop_assert!(hi <= lo, "B={} gives {}, B+1 gives {}", budget, lo, hi);
    }

    #[test]
    fn graph_sizes_grow_with_budget(seed in any::<u64>(), budget in 0u32..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = small_product(&mut rng, 16);
        let a = solve(&p, budget, SynthConfig::default()).unwrap().stats;
        let b = solve(&p, budget + 1, SynthConfig::default()).unwrap().stats;
        prop_assert!(a.utility_nodes <= b.utility_nodes);
        prop_assert!(a.best_response_nodes <= b.best_response_nodes);
    }
}
