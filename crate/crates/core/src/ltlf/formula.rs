use std::collections::BTreeSet;
use std::fmt;

/// LTLf syntax tree.
///
/// `Eventually`, `Globally` and `Implies` are kept as written by the parser so
/// that printed formulas stay recognizable; [`Formula::to_nnf`] eliminates
/// them. `WeakNext` (`N`) and `Release` (`R`) are the duals needed to push
/// negation down to atoms on finite traces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    WeakNext(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Next(Box::new(f))
    }

    pub fn weak_next(f: Formula) -> Formula {
        WeakNext(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Formula {
        Eventually(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Globally(Box::new(f))
    }

    /// Holds exactly on nonempty traces.
    pub(crate) fn nonempty() -> Formula {
        Formula::until(True, True)
    }

    /// Holds exactly on the empty trace.
    pub(crate) fn empty() -> Formula {
        Formula::release(False, False)
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            True | False => {}
            Atom(p) => {
                out.insert(p.clone());
            }
            Not(a) | Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => a.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            True | False | Atom(_) => 0,
            Not(a) | Next(a) | WeakNext(a) | Eventually(a) | Globally(a) => 1 + a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// True when negation sits only directly above atoms and the derived
    /// operators are gone.
    pub fn is_nnf(&self) -> bool {
        match self {
            True | False | Atom(_) => true,
            Not(a) => matches!(**a, Atom(_)),
            Implies(..) | Eventually(_) | Globally(_) => false,
            Next(a) | WeakNext(a) => a.is_nnf(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => a.is_nnf() && b.is_nnf(),
        }
    }

    /// Negation normal form using the finite-trace dualities
    /// `¬Xφ ≡ N¬φ`, `¬Nφ ≡ X¬φ`, `¬(φ U ψ) ≡ ¬φ R ¬ψ`.
    pub fn to_nnf(&self) -> Formula {
        self.nnf(false)
    }

    fn nnf(&self, negate: bool) -> Formula {
        match (self, negate) {
            (True, false) | (False, true) => True,
            (True, true) | (False, false) => False,
            (Atom(p), false) => Atom(p.clone()),
            (Atom(p), true) => Formula::not(Atom(p.clone())),
            (Not(a), n) => a.nnf(!n),
            (And(a, b), false) => Formula::and(a.nnf(false), b.nnf(false)),
            (And(a, b), true) => Formula::or(a.nnf(true), b.nnf(true)),
            (Or(a, b), false) => Formula::or(a.nnf(false), b.nnf(false)),
            (Or(a, b), true) => Formula::and(a.nnf(true), b.nnf(true)),
            (Implies(a, b), false) => Formula::or(a.nnf(true), b.nnf(false)),
            (Implies(a, b), true) => Formula::and(a.nnf(false), b.nnf(true)),
            (Next(a), false) => Formula::next(a.nnf(false)),
            (Next(a), true) => Formula::weak_next(a.nnf(true)),
            (WeakNext(a), false) => Formula::weak_next(a.nnf(false)),
            (WeakNext(a), true) => Formula::next(a.nnf(true)),
            (Until(a, b), false) => Formula::until(a.nnf(false), b.nnf(false)),
            (Until(a, b), true) => Formula::release(a.nnf(true), b.nnf(true)),
            (Release(a, b), false) => Formula::release(a.nnf(false), b.nnf(false)),
            (Release(a, b), true) => Formula::until(a.nnf(true), b.nnf(true)),
            // F φ = true U φ ; G φ = ¬F¬φ = false R φ
            (Eventually(a), false) => Formula::until(True, a.nnf(false)),
            (Eventually(a), true) => Formula::release(False, a.nnf(true)),
            (Globally(a), false) => Formula::release(False, a.nnf(false)),
            (Globally(a), true) => Formula::until(True, a.nnf(true)),
        }
    }

    /// Canonical representative of an NNF formula.
    ///
    /// Boolean structure is put in disjunctive normal form over temporal
    /// literals, clauses sorted by the derived total order, with units,
    /// complements and absorption applied. Two progression states are merged
    /// iff their canonical forms are equal.
    pub fn canonical(&self) -> Formula {
        match self {
            True | False | Atom(_) => self.clone(),
            Not(a) => match a.canonical() {
                True => False,
                False => True,
                Not(inner) => *inner,
                other => Formula::not(other),
            },
            And(..) | Or(..) => rebuild(simplify(dnf(self))),
            Next(_) | WeakNext(_) | Until(..) | Release(..) => canonical_literal(self),
            Implies(..) | Eventually(_) | Globally(_) => self.to_nnf().canonical(),
        }
    }
}

type Clause = BTreeSet<Formula>;

/// Disjunctive normal form over temporal literals: atoms, negated atoms and
/// canonical `X`, `N`, `U`, `R` nodes. Progression states are Boolean
/// combinations of finitely many such literals, so DNF keeps the state space
/// finite where a syntactic normal form need not.
fn dnf(f: &Formula) -> BTreeSet<Clause> {
    match f {
        True => BTreeSet::from([Clause::new()]),
        False => BTreeSet::new(),
        Or(a, b) => {
            let mut out = dnf(a);
            out.extend(dnf(b));
            out
        }
        And(a, b) => {
            let (l, r) = (dnf(a), dnf(b));
            let mut out = BTreeSet::new();
            for x in &l {
                for y in &r {
                    out.insert(x.union(y).cloned().collect());
                }
            }
            out
        }
        Implies(..) | Eventually(_) | Globally(_) => dnf(&f.to_nnf()),
        Not(a) if !matches!(**a, Atom(_)) => dnf(&f.to_nnf()),
        lit => match canonical_literal(lit) {
            True => BTreeSet::from([Clause::new()]),
            False => BTreeSet::new(),
            c => BTreeSet::from([Clause::from([c])]),
        },
    }
}

fn canonical_literal(f: &Formula) -> Formula {
    match f {
        Next(a) => match a.canonical() {
            False => False,
            c => Formula::next(c),
        },
        WeakNext(a) => match a.canonical() {
            True => True,
            c => Formula::weak_next(c),
        },
        Until(a, b) => match b.canonical() {
            False => False,
            cb => Formula::until(a.canonical(), cb),
        },
        Release(a, b) => match b.canonical() {
            True => True,
            cb => Formula::release(a.canonical(), cb),
        },
        other => other.clone(),
    }
}

fn complement(lit: &Formula) -> Option<Formula> {
    match lit {
        Atom(_) => Some(Formula::not(lit.clone())),
        Not(a) if matches!(**a, Atom(_)) => Some((**a).clone()),
        _ => None,
    }
}

/// Drops contradictory and subsumed clauses and merges pairs that differ in
/// one complementary literal, until nothing changes.
fn simplify(mut clauses: BTreeSet<Clause>) -> BTreeSet<Clause> {
    clauses.retain(|c| !c.iter().any(|l| complement(l).is_some_and(|n| c.contains(&n))));
    loop {
        let mut merged = None;
        'search: for c in &clauses {
            for l in c {
                let Some(n) = complement(l) else { continue };
                let mut other = c.clone();
                other.remove(l);
                other.insert(n);
                if clauses.contains(&other) {
                    let mut rest = c.clone();
                    rest.remove(l);
                    merged = Some(rest);
                    break 'search;
                }
            }
        }
        let changed = match merged {
            Some(rest) => clauses.insert(rest),
            None => false,
        };
        let list: Vec<Clause> = clauses.iter().cloned().collect();
        let before = clauses.len();
        clauses.retain(|c| !list.iter().any(|o| o != c && o.is_subset(c)));
        if !changed && clauses.len() == before {
            return clauses;
        }
    }
}

fn rebuild(clauses: BTreeSet<Clause>) -> Formula {
    let fold = |items: Vec<Formula>, unit: Formula, join: fn(Formula, Formula) -> Formula| {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => unit,
            Some(last) => it.fold(last, |acc, x| join(x, acc)),
        }
    };
    let terms: Vec<Formula> = clauses
        .into_iter()
        .map(|c| fold(c.into_iter().collect(), True, Formula::and))
        .collect();
    fold(terms, False, Formula::or)
}

fn needs_parens(f: &Formula) -> bool {
    matches!(
        f,
        And(..) | Or(..) | Implies(..) | Until(..) | Release(..)
    )
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if needs_parens(self.0) {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Prints in the input grammar; the output parses back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(p) => f.write_str(p),
            Not(a) => write!(f, "!{}", Operand(a)),
            Next(a) => write!(f, "X {}", Operand(a)),
            WeakNext(a) => write!(f, "N {}", Operand(a)),
            Eventually(a) => write!(f, "F {}", Operand(a)),
            Globally(a) => write!(f, "G {}", Operand(a)),
            And(a, b) => write!(f, "{} & {}", Operand(a), Operand(b)),
            Or(a, b) => write!(f, "{} | {}", Operand(a), Operand(b)),
            Implies(a, b) => write!(f, "{} -> {}", Operand(a), Operand(b)),
            Until(a, b) => write!(f, "{} U {}", Operand(a), Operand(b)),
            Release(a, b) => write!(f, "{} R {}", Operand(a), Operand(b)),
        }
    }
}
