use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Formula;

/// One observation: the set of atoms that hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub BTreeSet<String>);

impl Letter {
    pub fn new<I, S>(atoms: I) -> Letter
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Letter(atoms.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Letter {
        Letter::default()
    }

    /// The letter whose atoms are the set bits of `mask` over `props`.
    pub fn from_mask(props: &[String], mask: u32) -> Letter {
        Letter(
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect(),
        )
    }
}

/// Anything that can answer "does this atom hold?".
pub trait Valuation {
    fn holds(&self, atom: &str) -> bool;
}

impl Valuation for Letter {
    fn holds(&self, atom: &str) -> bool {
        self.0.contains(atom)
    }
}

impl Valuation for BTreeSet<String> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(atom)
    }
}

/// A bitmask letter over an ordered proposition list.
pub struct MaskLetter<'a> {
    pub props: &'a [String],
    pub mask: u32,
}

impl Valuation for MaskLetter<'_> {
    fn holds(&self, atom: &str) -> bool {
        self.props
            .iter()
            .position(|p| p == atom)
            .is_some_and(|i| self.mask >> i & 1 == 1)
    }
}

/// Reference semantics: does `trace` satisfy `f` at position 0?
///
/// Direct recursive evaluation of the finite-trace clauses. On the empty
/// suffix atoms, `X` and `U` are false while `N`, `R` and `true` hold.
pub fn satisfies<V: Valuation>(trace: &[V], f: &Formula) -> bool {
    holds_at(trace, 0, f)
}

fn holds_at<V: Valuation>(trace: &[V], i: usize, f: &Formula) -> bool {
    let n = trace.len();
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => i < n && trace[i].holds(p),
        Formula::Not(a) => !holds_at(trace, i, a),
        Formula::And(a, b) => holds_at(trace, i, a) && holds_at(trace, i, b),
        Formula::Or(a, b) => holds_at(trace, i, a) || holds_at(trace, i, b),
        Formula::Implies(a, b) => !holds_at(trace, i, a) || holds_at(trace, i, b),
        Formula::Next(a) => n > i + 1 && holds_at(trace, i + 1, a),
        Formula::WeakNext(a) => n <= i + 1 || holds_at(trace, i + 1, a),
        Formula::Until(a, b) => (i..n).any(|j| {
            holds_at(trace, j, b) && (i..j).all(|k| holds_at(trace, k, a))
        }),
        Formula::Release(a, b) => (i..n).all(|j| {
            holds_at(trace, j, b) || (i..j).any(|k| holds_at(trace, k, a))
        }),
        Formula::Eventually(a) => (i..n).any(|j| holds_at(trace, j, a)),
        Formula::Globally(a) => (i..n).all(|j| holds_at(trace, j, a)),
    }
}

/// Does the empty trace satisfy the NNF formula `f`?
pub fn epsilon_eval(f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(_) | Formula::Next(_) | Formula::Until(..) | Formula::Eventually(_) => false,
        Formula::WeakNext(_) | Formula::Release(..) | Formula::Globally(_) => true,
        Formula::Not(a) => !epsilon_eval(a),
        Formula::And(a, b) => epsilon_eval(a) && epsilon_eval(b),
        Formula::Or(a, b) => epsilon_eval(a) || epsilon_eval(b),
        Formula::Implies(a, b) => !epsilon_eval(a) || epsilon_eval(b),
    }
}

/// Residual obligation after consuming `letter`.
///
/// For every continuation `w` (possibly empty):
/// `w ⊨ progress(f, l)` iff `l·w ⊨ f`. Input must be in NNF; output is
/// canonical.
pub fn progress<V: Valuation>(f: &Formula, letter: &V) -> Formula {
    step(f, letter).canonical()
}

fn step<V: Valuation>(f: &Formula, l: &V) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Atom(p) => {
            if l.holds(p) {
                True
            } else {
                False
            }
        }
        Not(a) => match &**a {
            Atom(p) => {
                if l.holds(p) {
                    False
                } else {
                    True
                }
            }
            _ => step(&f.to_nnf(), l),
        },
        And(a, b) => Formula::and(step(a, l), step(b, l)),
        Or(a, b) => Formula::or(step(a, l), step(b, l)),
        // the strong successor must exist
        Next(a) => Formula::and((**a).clone(), Formula::nonempty()),
        // the weak successor may be absent
        WeakNext(a) => Formula::or((**a).clone(), Formula::empty()),
        Until(a, b) => Formula::or(step(b, l), Formula::and(step(a, l), f.clone())),
        Release(a, b) => Formula::and(step(b, l), Formula::or(step(a, l), f.clone())),
        Implies(..) | Eventually(_) | Globally(_) => step(&f.to_nnf(), l),
    }
}
