//! Parametric blocks-world games for the arch and line tasks.
//!
//! The table has two regions, `H` (within the human's reach) and `R` (robot
//! only). Each region holds the task slots of the preset plus `locations`
//! free table spots. The robot moves one block per turn to any free
//! location and pays the cost of the destination region. The human either
//! waits or moves one block that sits in `H` to a free location in `H`.
//!
//! Arch physics: a block may sit on `top` only while both supports `s1`
//! and `s2` of that region are occupied, and supports under a top block
//! cannot be moved. Line slots (`bot`, `mid`, `top`) have no physics.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EdgeSpec, GameError, GameGraph, GameState, Owner, ARCH_FORMULA, LINE_FORMULA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Arch,
    Line,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Arch, Preset::Line];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Arch => "arch",
            Preset::Line => "line",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Preset::Arch => ARCH_FORMULA,
            Preset::Line => LINE_FORMULA,
        }
    }

    /// Budget used with this preset by default.
    pub fn default_budget(self) -> u32 {
        match self {
            Preset::Arch => 10,
            Preset::Line => 20,
        }
    }

    fn slots(self) -> [&'static str; 3] {
        match self {
            Preset::Arch => ["s1", "s2", "top"],
            Preset::Line => ["bot", "mid", "top"],
        }
    }

    fn task_blocks(self) -> [&'static str; 3] {
        match self {
            Preset::Arch => ["green", "pink", "blue"],
            Preset::Line => ["pink", "blue", "green"],
        }
    }

    /// Starting position of the named blocks, extras excluded.
    fn base_layout(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Preset::Arch => &[
                ("green", "H.s1"),
                ("blue", "R.s1"),
                ("yellow", "R.s2"),
                ("pink", "R.top"),
            ],
            Preset::Line => &[
                ("pink", "H.top"),
                ("blue", "R.bot"),
                ("green", "R.mid"),
                ("yellow", "R.top"),
            ],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Preset {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arch" => Ok(Preset::Arch),
            "line" => Ok(Preset::Line),
            other => Err(GameError::Scenario(format!("unknown preset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub preset: Preset,
    /// Total blocks; blocks beyond the preset layout start on free spots.
    pub blocks: usize,
    /// Free table spots per region, besides the task slots.
    pub locations: usize,
    pub robot_cost: u32,
    pub human_cost: u32,
    /// Explicit `(block, location)` start positions replacing the preset
    /// layout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<(String, String)>>,
}

impl ScenarioParams {
    /// The smallest instance of `preset`.
    pub fn minimal(preset: Preset) -> ScenarioParams {
        ScenarioParams {
            preset,
            blocks: preset.base_layout().len(),
            locations: 1,
            robot_cost: 3,
            human_cost: 1,
            layout: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub game: GameGraph,
    pub formula: String,
    pub budget: u32,
}

/// A location is `(region, spot)`: region 0 is `H`, 1 is `R`; spots
/// `0..3` are task slots and the rest table spots.
type Loc = (u8, u8);

struct World<'a> {
    preset: Preset,
    blocks: Vec<String>,
    spots: usize,
    robot_cost: u32,
    human_cost: u32,
    slot_names: [&'a str; 3],
}

const TOP: u8 = 2;

impl World<'_> {
    fn loc_name(&self, (r, s): Loc) -> String {
        let region = if r == 0 { "H" } else { "R" };
        if (s as usize) < 3 {
            format!("{region}.{}", self.slot_names[s as usize])
        } else {
            format!("{region}.t{}", s as usize - 2)
        }
    }

    fn parse_loc(&self, text: &str) -> Option<Loc> {
        let (region, spot) = text.split_once('.')?;
        let r = match region {
            "H" => 0,
            "R" => 1,
            _ => return None,
        };
        if let Some(i) = self.slot_names.iter().position(|s| *s == spot) {
            return Some((r, i as u8));
        }
        let k: usize = spot.strip_prefix('t')?.parse().ok()?;
        (1..=self.spots).contains(&k).then_some((r, (k + 2) as u8))
    }

    fn occupied(&self, pos: &[Loc], l: Loc) -> bool {
        pos.contains(&l)
    }

    fn arch(&self) -> bool {
        self.preset == Preset::Arch
    }

    fn can_leave(&self, pos: &[Loc], b: usize) -> bool {
        let (r, s) = pos[b];
        !(self.arch() && s < TOP && self.occupied(pos, (r, TOP)))
    }

    fn can_enter(&self, pos: &[Loc], b: usize, (r, s): Loc) -> bool {
        if self.occupied(pos, (r, s)) {
            return false;
        }
        if self.arch() && s == TOP {
            // the supports must stay put, and the moving block cannot be one
            let support = |i: u8| pos.iter().enumerate().any(|(j, &l)| j != b && l == (r, i));
            return support(0) && support(1);
        }
        true
    }

    fn all_locs(&self) -> Vec<Loc> {
        (0..2u8)
            .flat_map(|r| (0..(3 + self.spots) as u8).map(move |s| (r, s)))
            .collect()
    }

    fn block(&self, name: &str) -> usize {
        self.blocks.iter().position(|b| b == name).expect("task block present")
    }

    fn labels(&self, pos: &[Loc]) -> BTreeSet<String> {
        let [a, b, c] = self.preset.task_blocks();
        let mut out = BTreeSet::new();
        match self.preset {
            Preset::Arch => {
                let (r, s) = pos[self.block(a)];
                if s == TOP {
                    out.insert("g_top".to_string());
                }
                if self.occupied(pos, (r, 0)) {
                    out.insert("b_s1".to_string());
                }
                if self.occupied(pos, (r, 1)) {
                    out.insert("b_s2".to_string());
                }
            }
            Preset::Line => {
                let (r, s) = pos[self.block(a)];
                if s == TOP {
                    out.insert("pink_top".to_string());
                }
                if pos[self.block(b)] == (r, 1) {
                    out.insert("blue_mid".to_string());
                }
                if pos[self.block(c)] == (r, 0) {
                    out.insert("green_bot".to_string());
                }
            }
        }
        out
    }

    fn props(&self) -> BTreeSet<String> {
        let names: &[&str] = match self.preset {
            Preset::Arch => &["b_s1", "b_s2", "g_top"],
            Preset::Line => &["blue_mid", "green_bot", "pink_top"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    fn state_id(&self, owner: Owner, pos: &[Loc]) -> String {
        let body: Vec<String> = self
            .blocks
            .iter()
            .zip(pos)
            .map(|(b, &l)| format!("{b}={}", self.loc_name(l)))
            .collect();
        let turn = match owner {
            Owner::Robot => 'r',
            Owner::Human => 'h',
        };
        format!("{turn}[{}]", body.join(","))
    }
}

/// Builds the blocks-world game and task of `p`.
pub fn generate_scenario(p: &ScenarioParams) -> Result<Scenario, GameError> {
    if p.blocks == 0 || p.locations == 0 || p.robot_cost == 0 || p.human_cost == 0 {
        return Err(GameError::Scenario(
            "block count, location count and costs must be at least 1".into(),
        ));
    }
    let capacity = 2 * (3 + p.locations);
    if p.blocks > capacity {
        return Err(GameError::Capacity {
            blocks: p.blocks,
            locations: capacity,
        });
    }
    let base: Vec<(String, String)> = match &p.layout {
        Some(l) => l.clone(),
        None => p
            .preset
            .base_layout()
            .iter()
            .map(|(b, l)| (b.to_string(), l.to_string()))
            .collect(),
    };
    let task = p.preset.task_blocks();
    if base.len() > p.blocks {
        return Err(GameError::Scenario(format!(
            "the {} layout needs at least {} blocks",
            p.preset,
            base.len()
        )));
    }
    let mut world = World {
        preset: p.preset,
        blocks: base.iter().map(|(b, _)| b.clone()).collect(),
        spots: p.locations,
        robot_cost: p.robot_cost,
        human_cost: p.human_cost,
        slot_names: p.preset.slots(),
    };
    for t in task {
        if !world.blocks.iter().any(|b| b == t) {
            return Err(GameError::Scenario(format!("layout lacks the `{t}` block")));
        }
    }
    let mut pos: Vec<Loc> = Vec::new();
    for (b, l) in &base {
        let loc = world
            .parse_loc(l)
            .ok_or_else(|| GameError::Scenario(format!("unknown location `{l}` for block `{b}`")))?;
        if pos.contains(&loc) {
            return Err(GameError::Scenario(format!("location `{l}` is used twice")));
        }
        pos.push(loc);
    }
    // extra blocks fill free table spots, robot region first
    let mut free = world
        .all_locs()
        .into_iter()
        .filter(|&(r, s)| s >= 3 && !pos.contains(&(r, s)))
        .collect::<Vec<_>>();
    free.sort_by_key(|&(r, s)| (std::cmp::Reverse(r), s));
    for k in base.len()..p.blocks {
        let Some(l) = free.first().copied() else {
            return Err(GameError::Scenario(format!(
                "no free table spot for {} extra blocks; add locations",
                p.blocks - base.len()
            )));
        };
        free.remove(0);
        world.blocks.push(format!("x{}", k - base.len() + 1));
        pos.push(l);
    }
    for t in task {
        let b = world.block(t);
        let mut without = pos.clone();
        without[b] = (9, 9);
        if !world.can_enter(&without, b, pos[b]) {
            return Err(GameError::Scenario(format!("block `{t}` starts in an unsupported position")));
        }
    }

    let game = explore(&world, pos)?;
    Ok(Scenario {
        game,
        formula: p.preset.formula().to_string(),
        budget: p.preset.default_budget(),
    })
}

fn explore(w: &World<'_>, start: Vec<Loc>) -> Result<GameGraph, GameError> {
    let locs = w.all_locs();
    let mut index: HashMap<(Owner, Vec<Loc>), usize> = HashMap::new();
    let mut states: Vec<GameState> = Vec::new();
    let mut keys: Vec<(Owner, Vec<Loc>)> = Vec::new();
    let mut edges: Vec<EdgeSpec> = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |owner: Owner, pos: Vec<Loc>, states: &mut Vec<GameState>, keys: &mut Vec<_>, queue: &mut VecDeque<usize>| {
        let key = (owner, pos);
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = states.len();
        states.push(GameState {
            id: w.state_id(owner, &key.1),
            owner,
            labels: w.labels(&key.1),
        });
        keys.push(key.clone());
        index.insert(key, i);
        queue.push_back(i);
        i
    };
    intern(Owner::Robot, start, &mut states, &mut keys, &mut queue);

    while let Some(i) = queue.pop_front() {
        let (owner, pos) = keys[i].clone();
        let from = states[i].id.clone();
        let mut out: Vec<(String, Vec<Loc>, u32)> = Vec::new();
        match owner {
            Owner::Robot => {
                for b in 0..pos.len() {
                    if !w.can_leave(&pos, b) {
                        continue;
                    }
                    for &l in locs.iter().filter(|l| l.1 < 3) {
                        if w.can_enter(&pos, b, l) {
                            let mut next = pos.clone();
                            next[b] = l;
                            let cost = if l.0 == 0 { w.human_cost } else { w.robot_cost };
                            out.push((format!("place({},{})", w.blocks[b], w.loc_name(l)), next, cost));
                        }
                    }
                }
            }
            Owner::Human => {
                out.push(("wait".to_string(), pos.clone(), 0));
                for b in 0..pos.len() {
                    if pos[b].0 != 0 || !w.can_leave(&pos, b) {
                        continue;
                    }
                    for &l in locs.iter().filter(|l| l.0 == 0) {
                        if w.can_enter(&pos, b, l) {
                            let mut next = pos.clone();
                            next[b] = l;
                            out.push((format!("move({},{})", w.blocks[b], w.loc_name(l)), next, 0));
                        }
                    }
                }
            }
        }
        let other = match owner {
            Owner::Robot => Owner::Human,
            Owner::Human => Owner::Robot,
        };
        for (action, next, cost) in out {
            let t = intern(other, next, &mut states, &mut keys, &mut queue);
            edges.push(EdgeSpec {
                from: from.clone(),
                action,
                to: states[t].id.clone(),
                cost,
            });
        }
    }
    let init = states[0].id.clone();
    GameGraph::new(w.props(), states, &init, edges)
}

/// Block positions of a generated state id, e.g. `{"green": "R.top"}`.
pub fn parse_state_id(id: &str) -> Option<BTreeMap<String, String>> {
    let body = id.get(1..)?.strip_prefix('[')?.strip_suffix(']')?;
    body.split(',')
        .map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}
