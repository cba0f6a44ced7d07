//! Regret-minimizing synthesis: budget-bounded unfolding into a graph of
//! utility, best-alternate values, the best-response graph, and a backward
//! min/max sweep for the regret values.

mod best_response;
mod oracle;
mod synth;
mod utility;

pub use best_response::{backward_values, best_edge, build_best_response_graph, BestResponseGraph, BrNode};
pub use oracle::{brute_force_regret, memoryless_table, MemorylessTable, DEFAULT_ORACLE_LIMIT};
pub use synth::{
    baseline_strategy, solve, strategy_from, sweep_budgets, synthesize, RegretStrategy, Solved, StrategyRow, SynthConfig, SynthStats,
    DEFAULT_NODE_CAP,
};
pub use utility::{compute_ba, unfold_utility, NodeKind, UEdge, UNode, UtilityGraph};

use thiserror::Error;

use crate::Cost;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegretError {
    #[error("{graph} graph exceeded {cap} nodes; try a smaller budget")]
    NodeBudget { graph: &'static str, cap: usize },
    #[error("no strategy within budget {budget}; minimal budget is B_min = {min_budget}")]
    Infeasible { budget: u32, min_budget: Cost },
    #[error("oracle refused: {what} count {size} exceeds limit {limit}")]
    OracleTooLarge { what: &'static str, size: u64, limit: u64 },
    #[error("invalid strategy file: {0}")]
    StrategyFile(String),
}
