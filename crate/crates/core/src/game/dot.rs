use std::fmt::Write as _;

use super::{GameGraph, Owner};

/// Graphviz rendering: robot states as boxes, human states as circles, edges
/// labeled `action/cost`. Emission order follows state order and the sorted
/// edge lists, so output is stable.
pub fn export_dot(g: &GameGraph) -> String {
    let mut out = String::from("digraph game {\n  init [shape=point];\n");
    for (v, s) in g.states().iter().enumerate() {
        let shape = match s.owner {
            Owner::Robot => "box",
            Owner::Human => "circle",
        };
        let labels: Vec<&str> = s.labels.iter().map(String::as_str).collect();
        let _ = writeln!(
            out,
            "  n{v} [shape={shape}, label=\"{}\\n{{{}}}\"];",
            esc(&s.id),
            esc(&labels.join(","))
        );
    }
    let _ = writeln!(out, "  init -> n{};", g.init());
    for v in 0..g.num_states() {
        for e in g.edges(v) {
            let _ = writeln!(
                out,
                "  n{v} -> n{} [label=\"{}/{}\"];",
                e.target,
                esc(&e.action),
                e.cost
            );
        }
    }
    out.push_str("}\n");
    out
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
