use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::best_response::{backward_values, best_edge, build_best_response_graph, BestResponseGraph};
use super::utility::{compute_ba, unfold_utility, NodeKind, UtilityGraph};
use super::RegretError;
use crate::game::{game_hash, Owner};
use crate::par::{self, Parallelism};
use crate::product::{adversarial_values, coop_values, ProductConfig, ProductGame};
use crate::Cost;

/// Default cap on utility and best-response graph nodes.
pub const DEFAULT_NODE_CAP: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    /// Treat best alternatives that exceed the budget as unavailable.
    pub budgeted_ba: bool,
    pub node_cap: usize,
    pub parallelism: Parallelism,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            budgeted_ba: false,
            node_cap: DEFAULT_NODE_CAP,
            parallelism: Parallelism::default(),
        }
    }
}

/// Size and timing figures of one synthesis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthStats {
    pub product_states: usize,
    pub budget: u32,
    pub utility_nodes: usize,
    pub best_response_nodes: usize,
    pub root_regret: Cost,
    pub time_ms: f64,
}

/// All intermediate stages of one run, for inspection and testing.
#[derive(Debug, Clone)]
pub struct Solved {
    pub coop: Vec<Cost>,
    pub gu: UtilityGraph,
    pub ba: Vec<Vec<Cost>>,
    pub gbr: BestResponseGraph,
    pub values: Vec<Cost>,
    pub stats: SynthStats,
}

impl Solved {
    pub fn root_value(&self) -> Cost {
        self.values[0]
    }

    /// `(state, u, b, regret)` of every accepting best-response node.
    pub fn accepting_leaves(&self) -> Vec<(usize, u32, Cost, Cost)> {
        self.gbr
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| self.gu.nodes[n.unode].kind == NodeKind::Accepting)
            .map(|(i, n)| {
                let un = &self.gu.nodes[n.unode];
                (un.state, un.u, n.b, self.values[i])
            })
            .collect()
    }
}

/// Runs the four stages without requiring a finite root.
pub fn solve(p: &ProductGame, budget: u32, cfg: SynthConfig) -> Result<Solved, RegretError> {
    let start = Instant::now();
    let coop = coop_values(p);
    let gu = unfold_utility(p, budget, cfg.node_cap)?;
    let ba = compute_ba(&gu, &coop, cfg.budgeted_ba, cfg.parallelism);
    let gbr = build_best_response_graph(&gu, &ba, cfg.node_cap)?;
    let values = backward_values(&gu, &gbr);
    let stats = SynthStats {
        product_states: p.num_states(),
        budget,
        utility_nodes: gu.num_nodes(),
        best_response_nodes: gbr.num_nodes(),
        root_regret: values[0],
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(Solved {
        coop,
        gu,
        ba,
        gbr,
        values,
        stats,
    })
}

/// One reachable node of the best-response graph under the strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub state: usize,
    pub name: String,
    pub u: u32,
    pub b: Cost,
    /// Guaranteed regret bound from this node.
    pub value: Cost,
    /// Robot action, on robot nodes that are not leaves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    /// Best-alternate value of the chosen edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ba: Option<Cost>,
}

/// A finite-memory robot strategy: the memory is `(u, b)` and the table
/// covers every node the strategy can reach against any human behavior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretStrategy {
    pub budget: u32,
    pub root_regret: Cost,
    pub game_hash: String,
    pub formula: String,
    pub budgeted_ba: bool,
    /// Set for the min-max baseline, whose rows carry remaining worst-case
    /// cost in `value` instead of regret.
    #[serde(default)]
    pub baseline: bool,
    pub product: ProductConfig,
    pub stats: SynthStats,
    pub rows: Vec<StrategyRow>,
    #[serde(skip)]
    index: HashMap<(usize, u32, Cost), usize>,
}

impl PartialEq for RegretStrategy {
    fn eq(&self, other: &Self) -> bool {
        self.budget == other.budget
            && self.root_regret == other.root_regret
            && self.game_hash == other.game_hash
            && self.formula == other.formula
            && self.budgeted_ba == other.budgeted_ba
            && self.baseline == other.baseline
            && self.product == other.product
            && self.rows == other.rows
    }
}

impl RegretStrategy {
    fn reindex(&mut self) {
        self.index = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| ((r.state, r.u, r.b), i))
            .collect();
    }

    pub fn lookup(&self, state: usize, u: u32, b: Cost) -> Option<&StrategyRow> {
        self.index.get(&(state, u, b)).map(|&i| &self.rows[i])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serializes")
    }

    pub fn from_json(text: &str) -> Result<RegretStrategy, RegretError> {
        let mut s: RegretStrategy =
            serde_json::from_str(text).map_err(|e| RegretError::StrategyFile(e.to_string()))?;
        s.reindex();
        Ok(s)
    }
}

/// Full pipeline: regret-minimizing strategy within `budget`, or the
/// minimal feasible budget when none exists.
pub fn synthesize(
    p: &ProductGame,
    budget: u32,
    formula: &str,
    cfg: SynthConfig,
) -> Result<RegretStrategy, RegretError> {
    let solved = solve(p, budget, cfg)?;
    strategy_from(p, &solved, formula, cfg)
}

pub fn strategy_from(
    p: &ProductGame,
    solved: &Solved,
    formula: &str,
    cfg: SynthConfig,
) -> Result<RegretStrategy, RegretError> {
    let Solved { gu, ba, gbr, values, .. } = solved;
    if !values[0].is_finite() {
        return Err(RegretError::Infeasible {
            budget: gu.budget,
            min_budget: adversarial_values(p).min_budget(),
        });
    }
    let mut rows = Vec::new();
    let mut seen = vec![false; gbr.num_nodes()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(n) = stack.pop() {
        let node = gbr.nodes[n];
        let un = &gu.nodes[node.unode];
        let mut row = StrategyRow {
            state: un.state,
            name: p.name(un.state),
            u: un.u,
            b: node.b,
            value: values[n],
            action: None,
            ba: None,
        };
        let follow: Vec<usize> = match (un.kind, gu.owner(node.unode)) {
            (NodeKind::Inner, Owner::Robot) => {
                let i = best_edge(gbr, values, n).expect("finite robot node has a best edge");
                let ue = &gu.edges[node.unode][i];
                row.action = Some(p.edges(un.state)[ue.edge].action.clone());
                row.ba = Some(ba[node.unode][i]);
                gbr.edges[n][i].into_iter().collect()
            }
            (NodeKind::Inner, Owner::Human) => gbr.edges[n].iter().flatten().copied().collect(),
            _ => Vec::new(),
        };
        rows.push(row);
        for t in follow {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    rows.sort_by(|a, b| (a.u, a.state, a.b).cmp(&(b.u, b.state, b.b)));
    let mut s = RegretStrategy {
        budget: gu.budget,
        root_regret: values[0],
        game_hash: game_hash(p.game()),
        formula: formula.to_string(),
        budgeted_ba: cfg.budgeted_ba,
        baseline: false,
        product: p.config(),
        stats: solved.stats.clone(),
        rows,
        index: HashMap::new(),
    };
    s.reindex();
    Ok(s)
}

/// The adversarial baseline as a playable table: the robot follows the
/// min-max strategy, `b` stays infinite and the budget is `W(s0)`.
pub fn baseline_strategy(p: &ProductGame, formula: &str) -> Result<RegretStrategy, RegretError> {
    let t0 = Instant::now();
    let sol = adversarial_values(p);
    let Cost::Finite(w) = sol.min_budget() else {
        return Err(RegretError::Infeasible {
            budget: 0,
            min_budget: Cost::Infinite,
        });
    };
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(p.init(), 0u32)];
    seen.insert((p.init(), 0u32));
    while let Some((s, u)) = stack.pop() {
        let mut row = StrategyRow {
            state: s,
            name: p.name(s),
            u,
            b: Cost::Infinite,
            value: sol.values[s],
            action: None,
            ba: None,
        };
        let mut next = Vec::new();
        if !p.is_accepting(s) {
            match p.owner(s) {
                Owner::Robot => {
                    let e = &p.edges(s)[sol.strategy[s].expect("finite robot state has a move")];
                    row.action = Some(e.action.clone());
                    row.ba = Some(Cost::Infinite);
                    next.push((e.target, u + e.cost));
                }
                Owner::Human => next.extend(p.moves(s).map(|e| (e.target, u))),
            }
        }
        rows.push(row);
        for n in next {
            if seen.insert(n) {
                stack.push(n);
            }
        }
    }
    rows.sort_by(|a, b| (a.u, a.state).cmp(&(b.u, b.state)));
    let stats = SynthStats {
        product_states: p.num_states(),
        budget: w,
        utility_nodes: rows.len(),
        best_response_nodes: rows.len(),
        root_regret: Cost::Infinite,
        time_ms: t0.elapsed().as_secs_f64() * 1000.0,
    };
    let mut s = RegretStrategy {
        budget: w,
        root_regret: Cost::Infinite,
        game_hash: game_hash(p.game()),
        formula: formula.to_string(),
        budgeted_ba: false,
        baseline: true,
        product: p.config(),
        stats,
        rows,
        index: HashMap::new(),
    };
    s.reindex();
    Ok(s)
}

/// Runs [`solve`] for each budget, in parallel when enabled.
pub fn sweep_budgets(
    p: &ProductGame,
    budgets: &[u32],
    cfg: SynthConfig,
) -> Vec<Result<SynthStats, RegretError>> {
    let inner = SynthConfig {
        parallelism: Parallelism::Sequential,
        ..cfg
    };
    par::map(cfg.parallelism, budgets, |&b| solve(p, b, inner).map(|s| s.stats))
}
