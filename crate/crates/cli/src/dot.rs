//! DOT rendering: fission trees and forests with height-aligned vertices,
//! and diagrams with their leg chains.
//!
//! Tree vertices follow the drawing conventions of the reports this tool
//! mirrors: inner vertices are circles labeled by their exponent height,
//! filled when mandatory and hollow when optional, the root is square, and
//! vertices of equal height share a rank. Leaves list multiplicity, levels,
//! and class. Diagram core nodes are filled and labeled by multiplicity;
//! leg nodes are hollow.

use std::collections::BTreeMap;
use std::fmt::Write;

use wildrep_core::{Diagram, FissionForest, FissionTree, Rat, TreeNode};

/// Makes a label safe for use inside a file name.
pub fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

struct TreeWriter {
    out: String,
    next: usize,
    by_height: BTreeMap<Rat, Vec<String>>,
}

impl TreeWriter {
    fn node(&mut self, n: &TreeNode, root: bool) -> String {
        let id = format!("n{}", self.next);
        self.next += 1;
        match n {
            TreeNode::Inner(inner) => {
                let shape = if root { "square" } else { "circle" };
                let (fill, font) = if inner.mandatory {
                    ("black", "white")
                } else {
                    ("white", "black")
                };
                let _ = writeln!(
                    self.out,
                    "  {id} [shape={shape}, style=filled, fillcolor={fill}, fontcolor={font}, label={}];",
                    quote(&inner.height.to_string())
                );
                self.by_height
                    .entry(inner.height.clone())
                    .or_default()
                    .push(id.clone());
                for c in &inner.children {
                    let cid = self.node(c, false);
                    let _ = writeln!(self.out, "  {id} -- {cid};");
                }
                id
            }
            TreeNode::Leaf(leaf) => {
                let mut label = format!("#{}", leaf.mult);
                if !leaf.levels.is_empty() {
                    label.push_str(&format!(" {}", leaf.levels));
                }
                label.push_str(&format!(" {}", leaf.class));
                let _ = writeln!(
                    self.out,
                    "  {id} [shape=none, label={}];",
                    quote(&label)
                );
                id
            }
        }
    }

    fn finish(mut self) -> String {
        for ids in self.by_height.values() {
            if ids.len() > 1 {
                let _ = writeln!(self.out, "  {{ rank=same; {}; }}", ids.join("; "));
            }
        }
        self.out.push_str("}\n");
        self.out
    }
}

fn forest_dot_inner(title: &str, trees: &[&FissionTree]) -> String {
    let mut w = TreeWriter {
        out: String::new(),
        next: 0,
        by_height: BTreeMap::new(),
    };
    let _ = writeln!(w.out, "graph {} {{", sanitize(title));
    let _ = writeln!(w.out, "  rankdir=TB;");
    let _ = writeln!(w.out, "  node [fontname=\"monospace\"];");
    for t in trees {
        let id = w.node(&t.top, true);
        if let Some(p) = &t.point {
            let _ = writeln!(w.out, "  {id} [xlabel={}];", quote(&format!("at {p}")));
        }
    }
    w.finish()
}

pub fn tree_dot(title: &str, tree: &FissionTree) -> String {
    forest_dot_inner(title, &[tree])
}

pub fn forest_dot(title: &str, forest: &FissionForest) -> String {
    forest_dot_inner(title, &forest.trees.iter().collect::<Vec<_>>())
}

pub fn diagram_dot(title: &str, d: &Diagram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {{", sanitize(title));
    let _ = writeln!(out, "  node [shape=circle, fontname=\"monospace\"];");
    for (i, n) in d.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  c{i} [style=filled, fillcolor=black, fontcolor=white, label={}, xlabel={}];",
            quote(&n.mult.to_string()),
            quote(&format!("{} at {}", n.circle, n.point))
        );
    }
    for (i, row) in d.b.iter().enumerate() {
        for (j, &v) in row.iter().enumerate().skip(i) {
            if v == 0 {
                continue;
            }
            let label = if v == 1 {
                String::new()
            } else {
                format!(" [label={}]", quote(&v.to_string()))
            };
            let _ = writeln!(out, "  c{i} -- c{j}{label};");
        }
    }
    for (i, n) in d.nodes.iter().enumerate() {
        let mut prev = format!("c{i}");
        for (j, m) in n.leg.iter().enumerate() {
            let id = format!("l{i}_{j}");
            let _ = writeln!(
                out,
                "  {id} [style=filled, fillcolor=white, label={}];",
                quote(&m.to_string())
            );
            let _ = writeln!(out, "  {prev} -- {id};");
            prev = id;
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::analyze_source;

    #[test]
    fn file_labels_lose_their_separators() {
        assert_eq!(sanitize("-1/2"), "-1_2");
        assert_eq!(sanitize("generic"), "generic");
    }

    #[test]
    fn tree_output_marks_root_mandatory_and_ranks() {
        let a = analyze_source("class c { at inf: <x^(3)>, <0>; }", false).unwrap();
        let dot = tree_dot("enriched", a.readings.enriched.tree());
        assert!(dot.contains("shape=square"), "{dot}");
        assert!(dot.contains("fillcolor=black"), "{dot}");
        assert!(dot.contains("fillcolor=white"), "{dot}");
        assert!(dot.contains("rank=same"), "{dot}");
        assert!(dot.contains("at inf"), "{dot}");
    }

    #[test]
    fn diagram_output_draws_loops_and_hollow_legs() {
        let a = analyze_source(
            "class c { at inf: <x>, <2*x>; at 0: <x>; }",
            false,
        )
        .unwrap();
        let dot = diagram_dot("diagram", &a.diagram);
        assert!(dot.contains("c2 -- c2 [label=\"-2\"]"), "{dot}");
        assert!(dot.contains("c0 -- c2 [label=\"2\"]"), "{dot}");
        assert!(!dot.contains("c0 -- c1"), "{dot}");

        let pvi = analyze_source(
            "class c { at inf: <0> #2 {e1:[1]; e2:[1]}; at 0: <0>; at 1: <0>; at 2: <0>; }",
            false,
        )
        .unwrap();
        let dot = diagram_dot("diagram", &pvi.diagram);
        assert!(dot.contains("fillcolor=white"), "{dot}");
        assert!(dot.contains("l0_0"), "{dot}");
    }
}
