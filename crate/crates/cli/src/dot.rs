use std::collections::BTreeSet;
use std::fmt::Write;

use treeemb::classify::Classification;
use treeemb::{Address, FiniteTree, Tree};

/// Largest depth accepted for a truncation export.
pub const MAX_DOT_DEPTH: usize = 24;

fn quote(a: &Address) -> String {
    format!("\"{a}\"")
}

/// The depth-`depth` truncation as an undirected graph. With a
/// classification, axis vertices get `axis=true` and a red outline, a fixed
/// vertex is filled and an inverted edge is drawn bold.
pub fn export_tree(t: &Tree, depth: usize, highlight: Option<&Classification>) -> String {
    let depth = depth.min(MAX_DOT_DEPTH);
    let ft = t.truncate(depth);
    let labels = ft.labels().expect("truncations are labelled");
    let mut axis: BTreeSet<Address> = BTreeSet::new();
    let mut fixed = None;
    let mut inverted = None;
    if let Some(c) = highlight {
        if let Some(a) = &c.axis {
            axis.extend(a.backward().iter().cloned());
            if let Ok(fwd) = a.forward(4 * depth + 4) {
                axis.extend(fwd);
            }
        }
        fixed = c.fixed_vertex.clone();
        inverted = c.inverted_edge.clone();
    }
    let mut out = String::from("graph tree {\n  node [shape=circle, fontsize=10];\n");
    for a in labels {
        let mut attrs = vec![format!("label=\"{a}\"")];
        if axis.contains(a) {
            attrs.push("axis=true, color=red, penwidth=2".into());
        }
        if fixed.as_ref() == Some(a) {
            attrs.push("fixed=true, style=filled, fillcolor=lightblue".into());
        }
        writeln!(out, "  {} [{}];", quote(a), attrs.join(", ")).unwrap();
    }
    for &(u, v) in ft.edges() {
        let (a, b) = (&labels[u], &labels[v]);
        let swap = inverted
            .as_ref()
            .is_some_and(|(x, y)| (x == a && y == b) || (x == b && y == a));
        let attr = if swap { " [inverted=true, style=bold, color=blue]" } else { "" };
        writeln!(out, "  {} -- {}{attr};", quote(a), quote(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// A finite tree, labelled by addresses when it carries them.
pub fn export_finite(t: &FiniteTree) -> String {
    let name = |v: usize| t.label(v).map_or_else(|| format!("\"{v}\""), quote);
    let mut out = String::from("graph tree {\n  node [shape=circle, fontsize=10];\n");
    for v in 0..t.vertex_count() {
        writeln!(out, "  {} [degree={}];", name(v), t.degree(v)).unwrap();
    }
    for &(u, v) in t.edges() {
        writeln!(out, "  {} -- {};", name(u), name(v)).unwrap();
    }
    out.push_str("}\n");
    out
}
