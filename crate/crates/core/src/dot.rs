//! Graphviz renderings of automaton levels and dual graph components.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::automaton::Automaton;
use crate::error::Result;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Bipartite picture of the given levels: an edge `i:q -> (i+1):q'` labelled
/// `x` for every letter with `phi_i(q, x) = q'`. Parallel edges are merged
/// into one with a comma-separated label.
pub fn automaton_dot(automaton: &Automaton, levels: &[usize]) -> Result<String> {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for &level in levels {
        let table = automaton.level(level)?;
        let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
        for q in automaton.states() {
            for x in 1..=table.size() {
                let to = table.next_state(q, x);
                edges
                    .entry((q.index(), to.index()))
                    .or_default()
                    .push(x.to_string());
            }
        }
        for ((from, to), labels) in edges {
            let from = format!("{level}:{}", automaton.state_names()[from]);
            let to = format!("{}:{}", level + 1, automaton.state_names()[to]);
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(&from),
                quote(&to),
                quote(&labels.join(", "))
            );
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// One component `Gamma_i` per requested level: vertices `i:x`, an arrow
/// `x -> psi_i(q, x)` labelled `q|phi_i(q, x)` for every state.
pub fn dual_dot(automaton: &Automaton, levels: &[usize]) -> Result<String> {
    let mut out = String::from("digraph dual {\n");
    for &level in levels {
        let component = automaton.dual_graph_component(level)?;
        let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
        for a in &component.arrows {
            edges.entry((a.from, a.to)).or_default().push(format!(
                "{}|{}",
                automaton.state_name(a.input),
                automaton.state_name(a.output)
            ));
        }
        let _ = writeln!(
            out,
            "  subgraph cluster_{level} {{\n    label={};",
            quote(&format!("level {level}"))
        );
        for x in 1..=component.size {
            let _ = writeln!(out, "    {};", quote(&format!("{level}:{x}")));
        }
        for ((from, to), labels) in edges {
            let _ = writeln!(
                out,
                "    {} -> {} [label={}];",
                quote(&format!("{level}:{from}")),
                quote(&format!("{level}:{to}")),
                quote(&labels.join(", "))
            );
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    Ok(out)
}
