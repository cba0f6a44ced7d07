use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::semantics::{epsilon_eval, progress, MaskLetter, Valuation};
use super::{Formula, LtlfError};

/// Largest proposition set accepted; the alphabet is `2^props`.
pub const MAX_PROPS: usize = 16;

/// Default cap on progression states before minimization.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// A complete deterministic automaton over the powerset alphabet of `props`.
///
/// Letters are bitmasks: bit `i` set means `props[i]` holds. State numbering is
/// breadth-first from the initial state with letters visited in increasing
/// mask order, so equal inputs give identical automata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    pub props: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// `delta[state][mask]`
    pub delta: Vec<Vec<usize>>,
    /// Residual formula of a representative progression state, for display.
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct DfaOptions {
    pub state_cap: usize,
    pub minimize: bool,
}

impl Default for DfaOptions {
    fn default() -> Self {
        DfaOptions {
            state_cap: DEFAULT_STATE_CAP,
            minimize: true,
        }
    }
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.props.len()
    }

    pub fn step(&self, state: usize, mask: u32) -> usize {
        self.delta[state][mask as usize]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// Bitmask for a set of atoms; fails on atoms outside the alphabet.
    pub fn mask_of<'a, I>(&self, atoms: I) -> Result<u32, LtlfError>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut mask = 0u32;
        for atom in atoms {
            match self.props.iter().position(|p| p == atom) {
                Some(i) => mask |= 1 << i,
                None => return Err(LtlfError::AlphabetMismatch { atom: atom.clone() }),
            }
        }
        Ok(mask)
    }

    /// State reached after reading `trace` from the initial state.
    pub fn run<V: Valuation>(&self, trace: &[V]) -> usize {
        trace.iter().fold(self.initial, |z, letter| {
            let mask = self
                .props
                .iter()
                .enumerate()
                .filter(|(_, p)| letter.holds(p))
                .fold(0u32, |m, (i, _)| m | 1 << i);
            self.step(z, mask)
        })
    }

    pub fn accepts<V: Valuation>(&self, trace: &[V]) -> bool {
        self.accepting[self.run(trace)]
    }

    pub fn accepts_masks(&self, masks: &[u32]) -> bool {
        let z = masks.iter().fold(self.initial, |z, &m| self.step(z, m));
        self.accepting[z]
    }

    fn letter_text(&self, mask: usize) -> String {
        let atoms: Vec<&str> = self
            .props
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.as_str())
            .collect();
        format!("{{{}}}", atoms.join(","))
    }

    /// Graphviz rendering; accepting states are double circles and each edge
    /// lists every letter that takes it.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for z in 0..self.num_states() {
            let shape = if self.accepting[z] { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  q{z} [shape={shape}, label=\"q{z}\", tooltip=\"{}\"];",
                escape(&self.names[z])
            );
        }
        let _ = writeln!(out, "  init -> q{};", self.initial);
        for z in 0..self.num_states() {
            let mut grouped: Vec<(usize, Vec<String>)> = Vec::new();
            for mask in 0..self.num_letters() {
                let t = self.delta[z][mask];
                let text = self.letter_text(mask);
                match grouped.iter_mut().find(|(dst, _)| *dst == t) {
                    Some((_, v)) => v.push(text),
                    None => grouped.push((t, vec![text])),
                }
            }
            grouped.sort_by_key(|(dst, _)| *dst);
            for (dst, letters) in grouped {
                let _ = writeln!(
                    out,
                    "  q{z} -> q{dst} [label=\"{}\"];",
                    escape(&letters.join(", "))
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Compiles `f` over the proposition set `props` with default options.
pub fn build_dfa(f: &Formula, props: &BTreeSet<String>) -> Result<Dfa, LtlfError> {
    build_dfa_with(f, props, DfaOptions::default())
}

pub fn build_dfa_with(
    f: &Formula,
    props: &BTreeSet<String>,
    opts: DfaOptions,
) -> Result<Dfa, LtlfError> {
    if props.len() > MAX_PROPS {
        return Err(LtlfError::AlphabetTooLarge {
            props: props.len(),
            max: MAX_PROPS,
        });
    }
    if let Some(atom) = f.atoms().into_iter().find(|a| !props.contains(a)) {
        return Err(LtlfError::UnknownAtom { atom, offset: 0 });
    }
    let props: Vec<String> = props.iter().cloned().collect();
    let letters = 1u32 << props.len();

    let start = f.to_nnf().canonical();
    let mut index: HashMap<Formula, usize> = HashMap::new();
    let mut states: Vec<Formula> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    states.push(start);

    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let mut row = Vec::with_capacity(letters as usize);
        for mask in 0..letters {
            let next = progress(&states[q], &MaskLetter { props: &props, mask });
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= opts.state_cap {
                        return Err(LtlfError::StateBudget { cap: opts.state_cap });
                    }
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
    }

    let dfa = Dfa {
        accepting: states.iter().map(epsilon_eval).collect(),
        names: states.iter().map(ToString::to_string).collect(),
        props,
        initial: 0,
        delta,
    };
    Ok(if opts.minimize { minimize(&dfa) } else { dfa })
}

/// Moore-style partition refinement followed by breadth-first renumbering.
/// Unreachable states are dropped.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let n = dfa.num_states();
    let letters = dfa.num_letters();

    let mut class: Vec<usize> = dfa.accepting.iter().map(|&a| usize::from(a)).collect();
    let mut num_classes = class.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut sig_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0; n];
        for z in 0..n {
            let mut sig = Vec::with_capacity(letters + 1);
            sig.push(class[z]);
            sig.extend(dfa.delta[z].iter().map(|&t| class[t]));
            let fresh = sig_index.len();
            next[z] = *sig_index.entry(sig).or_insert(fresh);
        }
        let count = sig_index.len();
        class = next;
        if count == num_classes {
            break;
        }
        num_classes = count;
    }

    // renumber classes breadth-first from the initial state's class
    let mut order: HashMap<usize, usize> = HashMap::new();
    let mut rep: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    order.insert(class[dfa.initial], 0);
    rep.push(dfa.initial);
    queue.push_back(dfa.initial);
    while let Some(z) = queue.pop_front() {
        for &t in &dfa.delta[z] {
            let c = class[t];
            if !order.contains_key(&c) {
                order.insert(c, rep.len());
                rep.push(t);
                queue.push_back(t);
            }
        }
    }

    Dfa {
        props: dfa.props.clone(),
        initial: 0,
        accepting: rep.iter().map(|&z| dfa.accepting[z]).collect(),
        delta: rep
            .iter()
            .map(|&z| dfa.delta[z].iter().map(|&t| order[&class[t]]).collect())
            .collect(),
        names: rep.iter().map(|&z| dfa.names[z].clone()).collect(),
    }
}
