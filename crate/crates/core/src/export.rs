//! Graphviz DOT export.
//!
//! Nodes are sorted by name and edges by endpoints. Parallel edges between
//! the same pair of nodes are drawn once with their labels joined.

use std::collections::BTreeMap;
use std::io::Write;

use crate::automaton::{natural_cmp, Nfa};
use crate::composition::CcAutomaton;
use crate::error::Result;
use crate::observer::Observer;

pub struct GraphNode {
    pub name: String,
    pub initial: bool,
    pub secret: bool,
    /// Composition state whose estimate is empty.
    pub empty: bool,
}

/// Anything that can be drawn as a labelled directed graph.
pub trait Graph {
    fn graph_name(&self) -> &'static str;
    fn nodes(&self) -> Vec<GraphNode>;
    /// `(source, label, target)` triples.
    fn edges(&self) -> Vec<(String, String, String)>;
}

impl Graph for Nfa {
    fn graph_name(&self) -> &'static str {
        "automaton"
    }

    fn nodes(&self) -> Vec<GraphNode> {
        self.states()
            .map(|x| GraphNode {
                name: self.state_name(x).to_string(),
                initial: self.initial().contains(&x),
                secret: self.is_secret(x),
                empty: false,
            })
            .collect()
    }

    fn edges(&self) -> Vec<(String, String, String)> {
        self.transitions()
            .iter()
            .map(|t| {
                let n = self.named(t);
                (n.from, n.event, n.to)
            })
            .collect()
    }
}

impl Graph for Observer {
    fn graph_name(&self) -> &'static str {
        "observer"
    }

    fn nodes(&self) -> Vec<GraphNode> {
        self.ids()
            .map(|q| GraphNode {
                name: self.label(q),
                initial: self.initials().contains(&q),
                secret: false,
                empty: false,
            })
            .collect()
    }

    fn edges(&self) -> Vec<(String, String, String)> {
        self.transitions()
            .map(|(q, e, r)| (self.label(q), self.alphabet()[e.0].name.clone(), self.label(r)))
            .collect()
    }
}

impl Graph for CcAutomaton {
    fn graph_name(&self) -> &'static str {
        "composition"
    }

    fn nodes(&self) -> Vec<GraphNode> {
        self.ids()
            .map(|s| GraphNode {
                name: self.state_name(s),
                initial: self.initials().contains(&s),
                secret: self.is_left_secret(s),
                empty: self.is_empty_right(s),
            })
            .collect()
    }

    fn edges(&self) -> Vec<(String, String, String)> {
        self.transitions()
            .iter()
            .map(|t| {
                (
                    self.state_name(t.source),
                    self.event_label(&t.event),
                    self.state_name(t.target),
                )
            })
            .collect()
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Writes `graph` in DOT syntax.
///
/// Initial nodes get a double border, secret nodes are red and nodes with an
/// empty estimate are dashed.
pub fn export_graph<G: Graph + ?Sized>(graph: &G, sink: &mut dyn Write) -> Result<()> {
    let mut nodes = graph.nodes();
    nodes.sort_by(|a, b| natural_cmp(&a.name, &b.name));

    let mut edges: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for (from, label, to) in graph.edges() {
        edges.entry((from, to)).or_default().push(label);
    }
    let mut edges: Vec<((String, String), Vec<String>)> = edges.into_iter().collect();
    edges.sort_by(|((a1, a2), _), ((b1, b2), _)| natural_cmp(a1, b1).then_with(|| natural_cmp(a2, b2)));

    let mut out = String::new();
    out.push_str(&format!("digraph {} {{\n  rankdir=LR;\n", graph.graph_name()));
    for n in &nodes {
        let mut attrs = vec![format!("label={}", quote(&n.name))];
        if n.initial {
            attrs.push("peripheries=2".into());
        }
        if n.secret {
            attrs.push("color=red".into());
        }
        if n.empty {
            attrs.push("style=dashed".into());
        }
        out.push_str(&format!("  {} [{}];\n", quote(&n.name), attrs.join(", ")));
    }
    for ((from, to), mut labels) in edges {
        labels.sort();
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            quote(&from),
            quote(&to),
            quote(&labels.join(", "))
        ));
    }
    out.push_str("}\n");
    sink.write_all(out.as_bytes())?;
    Ok(())
}

/// [`export_graph`] into a string.
pub fn graph_to_string<G: Graph + ?Sized>(graph: &G) -> String {
    let mut buf = Vec::new();
    export_graph(graph, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("DOT output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_automaton_is_header_only() {
        let nfa = Nfa::builder().build().unwrap();
        assert_eq!(graph_to_string(&nfa), "digraph automaton {\n  rankdir=LR;\n}\n");
    }

    #[test]
    fn parallel_edges_share_a_line() {
        let nfa = Nfa::builder()
            .event("a", true, true)
            .event("b", true, true)
            .transition("0", "b", "1")
            .transition("0", "a", "1")
            .initial("0")
            .secret("1")
            .build()
            .unwrap();
        let text = graph_to_string(&nfa);
        assert!(text.contains("  \"0\" [label=\"0\", peripheries=2];\n"));
        assert!(text.contains("  \"1\" [label=\"1\", color=red];\n"));
        assert!(text.contains("  \"0\" -> \"1\" [label=\"a, b\"];\n"));
        assert_eq!(text, graph_to_string(&nfa));
    }

    #[test]
    fn write_failure_is_an_io_error() {
        struct Broken;
        impl Write for Broken {
            fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
                Err(std::io::Error::other("closed"))
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let nfa = Nfa::builder().state("0").build().unwrap();
        assert!(matches!(export_graph(&nfa, &mut Broken), Err(crate::Error::Io(_))));
    }
}
