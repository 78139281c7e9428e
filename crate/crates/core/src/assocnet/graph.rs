//! Directed item graph from one-to-one rules, with node selection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::AssociationRule;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    /// Transactions containing the item.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub source: String,
    pub target: String,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

/// Node-link form: `{directed, multigraph, nodes, links}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleGraph {
    pub directed: bool,
    pub multigraph: bool,
    pub nodes: Vec<GraphNode>,
    #[serde(rename = "links")]
    pub edges: Vec<GraphEdge>,
}

/// Keeps rules with one item on each side. With `selected`, an edge survives
/// only when both endpoints are selected, and every selected item present
/// in `item_counts` becomes a node even without edges. Nodes are sorted by
/// id; edges keep rule order.
pub fn build_graph(
    rules: &[AssociationRule],
    item_counts: &BTreeMap<String, usize>,
    selected: Option<&BTreeSet<String>>,
) -> RuleGraph {
    let selected: Option<BTreeSet<String>> =
        selected.map(|s| s.iter().map(|x| x.trim().to_lowercase()).collect());
    let keep = |item: &str| selected.as_ref().is_none_or(|s| s.contains(item));

    let edges: Vec<GraphEdge> = rules
        .iter()
        .filter_map(|r| match (r.antecedent.as_slice(), r.consequent.as_slice()) {
            ([a], [b]) if keep(a) && keep(b) => Some(GraphEdge {
                source: a.clone(),
                target: b.clone(),
                support: r.support,
                confidence: r.confidence,
                lift: r.lift,
            }),
            _ => None,
        })
        .collect();

    let mut ids: BTreeSet<&str> = edges
        .iter()
        .flat_map(|e| [e.source.as_str(), e.target.as_str()])
        .collect();
    if let Some(s) = &selected {
        ids.extend(s.iter().map(String::as_str).filter(|i| item_counts.contains_key(*i)));
    }
    let nodes = ids
        .into_iter()
        .map(|id| GraphNode {
            id: id.to_string(),
            count: item_counts.get(id).copied().unwrap_or(0),
        })
        .collect();

    RuleGraph {
        directed: true,
        multigraph: false,
        nodes,
        edges,
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

impl RuleGraph {
    pub fn to_graphml(&self) -> String {
        let mut out = String::from(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
             \x20 <key id=\"count\" for=\"node\" attr.name=\"count\" attr.type=\"int\"/>\n\
             \x20 <key id=\"support\" for=\"edge\" attr.name=\"support\" attr.type=\"double\"/>\n\
             \x20 <key id=\"confidence\" for=\"edge\" attr.name=\"confidence\" attr.type=\"double\"/>\n\
             \x20 <key id=\"lift\" for=\"edge\" attr.name=\"lift\" attr.type=\"double\"/>\n\
             \x20 <graph id=\"G\" edgedefault=\"directed\">\n",
        );
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "    <node id=\"{}\"><data key=\"count\">{}</data></node>",
                xml_escape(&n.id),
                n.count
            );
        }
        for (i, e) in self.edges.iter().enumerate() {
            let _ = writeln!(
                out,
                "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\"><data key=\"support\">{}</data>\
                 <data key=\"confidence\">{}</data><data key=\"lift\">{}</data></edge>",
                xml_escape(&e.source),
                xml_escape(&e.target),
                e.support,
                e.confidence,
                e.lift
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}
