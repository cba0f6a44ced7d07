use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExecError, PlayState};
use crate::game::Owner;
use crate::product::{coop_values, ProductGame};
use crate::regret::RegretStrategy;
use crate::Cost;

/// Something that picks human moves.
pub trait HumanAgent {
    fn choose(
        &mut self,
        strategy: &RegretStrategy,
        p: &ProductGame,
        st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "arg")]
pub enum HumanPolicy {
    /// Maximizes the strategy's regret value.
    Adversarial,
    /// Maximizes the robot's eventual payoff.
    CostMaximizing,
    /// Minimizes the cooperative value.
    Cooperative,
    /// Uniform over legal actions.
    Random,
    /// Plays the listed actions in order, then `wait` when legal, else the
    /// first legal action.
    Scripted(Vec<String>),
}

impl HumanPolicy {
    pub fn agent(&self, _strategy: &RegretStrategy, p: &ProductGame, seed: u64) -> Box<dyn HumanAgent> {
        match self {
            HumanPolicy::Adversarial => Box::new(Adversarial),
            HumanPolicy::CostMaximizing => Box::new(CostMaximizing::default()),
            HumanPolicy::Cooperative => Box::new(Cooperative { coop: coop_values(p) }),
            HumanPolicy::Random => Box::new(RandomAgent {
                rng: ChaCha8Rng::seed_from_u64(seed),
            }),
            HumanPolicy::Scripted(actions) => Box::new(Scripted {
                actions: actions.clone(),
                next: 0,
            }),
        }
    }
}

fn first_best<K: Ord + Copy>(legal: &[String], mut key: impl FnMut(&str) -> K) -> Result<String, ExecError> {
    let mut best: Option<(K, &String)> = None;
    for a in legal {
        let k = key(a);
        if best.is_none_or(|(bk, _)| k > bk) {
            best = Some((k, a));
        }
    }
    best.map(|(_, a)| a.clone()).ok_or(ExecError::Finished)
}

struct Adversarial;

impl HumanAgent for Adversarial {
    fn choose(
        &mut self,
        strategy: &RegretStrategy,
        p: &ProductGame,
        st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError> {
        first_best(legal, |a| {
            let t = p.successor(st.state, a).expect("legal").target;
            strategy.lookup(t, st.u, st.b).map(|r| r.value)
        })
    }
}

#[derive(Default)]
struct CostMaximizing {
    memo: HashMap<(usize, u32, Cost), Option<u32>>,
}

impl CostMaximizing {
    /// Largest final payoff reachable from a node when the robot follows
    /// the strategy.
    fn worst_payoff(&mut self, strategy: &RegretStrategy, p: &ProductGame, s: usize, u: u32, b: Cost) -> Option<u32> {
        if let Some(&v) = self.memo.get(&(s, u, b)) {
            return v;
        }
        let v = if p.is_accepting(s) {
            Some(u)
        } else {
            match p.owner(s) {
                Owner::Robot => strategy.lookup(s, u, b).and_then(|row| {
                    let e = p.successor(s, row.action.as_deref()?)?;
                    self.worst_payoff(strategy, p, e.target, u + e.cost, b.min(row.ba?))
                }),
                Owner::Human => {
                    let targets: Vec<usize> = p.moves(s).map(|e| e.target).collect();
                    targets
                        .into_iter()
                        .map(|t| self.worst_payoff(strategy, p, t, u, b))
                        .max()
                        .flatten()
                }
            }
        };
        self.memo.insert((s, u, b), v);
        v
    }
}

impl HumanAgent for CostMaximizing {
    fn choose(
        &mut self,
        strategy: &RegretStrategy,
        p: &ProductGame,
        st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError> {
        let keys: Vec<Option<u32>> = legal
            .iter()
            .map(|a| {
                let t = p.successor(st.state, a).expect("legal").target;
                self.worst_payoff(strategy, p, t, st.u, st.b)
            })
            .collect();
        let mut i = 0;
        first_best(legal, |_| {
            i += 1;
            keys[i - 1]
        })
    }
}

struct Cooperative {
    coop: Vec<Cost>,
}

impl HumanAgent for Cooperative {
    fn choose(
        &mut self,
        _strategy: &RegretStrategy,
        p: &ProductGame,
        st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError> {
        first_best(legal, |a| {
            let t = p.successor(st.state, a).expect("legal").target;
            std::cmp::Reverse(self.coop[t])
        })
    }
}

struct RandomAgent {
    rng: ChaCha8Rng,
}

impl HumanAgent for RandomAgent {
    fn choose(
        &mut self,
        _strategy: &RegretStrategy,
        _p: &ProductGame,
        _st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError> {
        if legal.is_empty() {
            return Err(ExecError::Finished);
        }
        Ok(legal[self.rng.random_range(0..legal.len())].clone())
    }
}

struct Scripted {
    actions: Vec<String>,
    next: usize,
}

impl HumanAgent for Scripted {
    fn choose(
        &mut self,
        _strategy: &RegretStrategy,
        _p: &ProductGame,
        _st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError> {
        if let Some(a) = self.actions.get(self.next) {
            self.next += 1;
            return Ok(a.clone());
        }
        legal
            .iter()
            .find(|a| *a == "wait")
            .or_else(|| legal.first())
            .cloned()
            .ok_or(ExecError::Finished)
    }
}
