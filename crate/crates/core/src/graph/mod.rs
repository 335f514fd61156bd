//! Weighted digraphs, text formats, strongly connected components and
//! propagation of per-component values to the nodes that reach them.

mod parse;
mod scc;

pub use parse::{parse_graph, Format};
pub use scc::{propagate_component_values, tarjan_scc, SccPartition};

use std::collections::HashMap;
use std::fmt;

/// Dense node index, `0 <= index < n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into [`WeightedDigraph::edges`].
pub type EdgeId = usize;

/// A directed edge with an integer weight and a strictly positive transit
/// weight (the denominator weight of ratio objectives).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: i64,
    pub transit: i64,
}

/// Immutable weighted digraph. Parallel edges are merged on construction;
/// self-loops are allowed.
#[derive(Clone, Debug)]
pub struct WeightedDigraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
}

impl WeightedDigraph {
    /// Graph on nodes `0..n` labelled by their index.
    ///
    /// Duplicate `(source, target)` pairs keep the edge of minimum weight.
    /// Panics on out-of-range endpoints or a transit weight below 1; use the
    /// parsers for untrusted input.
    pub fn from_edges(n: usize, edges: &[(usize, usize, i64, i64)]) -> Self {
        let mut b = GraphBuilder::with_nodes(n);
        for &(u, v, w, t) in edges {
            b.add_edge(NodeId::new(u), NodeId::new(v), w, t)
                .expect("invalid edge");
        }
        b.build()
    }

    /// Same as [`from_edges`](Self::from_edges) with every transit weight 1.
    pub fn from_weighted(n: usize, edges: &[(usize, usize, i64)]) -> Self {
        let full: Vec<_> = edges.iter().map(|&(u, v, w)| (u, v, w, 1)).collect();
        Self::from_edges(n, &full)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId::new)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn out_edges(&self, u: NodeId) -> &[EdgeId] {
        &self.out[u.index()]
    }

    pub fn in_edges(&self, u: NodeId) -> &[EdgeId] {
        &self.inc[u.index()]
    }

    pub fn successors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out[u.index()].iter().map(move |&e| self.edges[e].target)
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label).map(NodeId::new)
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.out[u.index()]
            .iter()
            .copied()
            .find(|&e| self.edges[e].target == v)
    }

    /// `W`: the largest absolute edge weight (0 for edgeless graphs).
    pub fn max_abs_weight(&self) -> i64 {
        self.edges
            .iter()
            .map(|e| e.weight.checked_abs().unwrap_or(i64::MAX))
            .max()
            .unwrap_or(0)
    }

    /// `T_max`: the largest transit weight (1 for edgeless graphs).
    pub fn max_transit(&self) -> i64 {
        self.edges.iter().map(|e| e.transit).max().unwrap_or(1)
    }

    /// Copy with every weight replaced by `f(edge)`; transit weights kept.
    pub fn map_weights(&self, mut f: impl FnMut(&Edge) -> i64) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight = f(e);
        }
        g
    }

    /// Copy with all weights negated.
    pub fn negated(&self) -> Self {
        self.map_weights(|e| -e.weight)
    }

    /// Copy with all transit weights set to 1 (the mean-payoff special case).
    pub fn with_unit_transit(&self) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.transit = 1;
        }
        g
    }

    /// Subgraph induced by `nodes` (in the given order) together with the
    /// mapping from new indices to old ones.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (WeightedDigraph, Vec<NodeId>) {
        let mut local = vec![u32::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            local[u.index()] = i as u32;
        }
        let mut b = GraphBuilder::new();
        for &u in nodes {
            b.add_node(self.label(u).to_string());
        }
        for &u in nodes {
            for &e in &self.out[u.index()] {
                let edge = &self.edges[e];
                let t = local[edge.target.index()];
                if t != u32::MAX {
                    b.push_edge_unchecked(Edge {
                        source: NodeId(local[u.index()]),
                        target: NodeId(t),
                        weight: edge.weight,
                        transit: edge.transit,
                    });
                }
            }
        }
        (b.build(), nodes.to_vec())
    }

    /// DIMACS-style text (`p mrc`, 1-based ids). Labels are not preserved.
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p mrc {} {}\n", self.node_count(), self.edge_count());
        for e in &self.edges {
            s.push_str(&format!(
                "a {} {} {} {}\n",
                e.source.index() + 1,
                e.target.index() + 1,
                e.weight,
                e.transit
            ));
        }
        s
    }

    /// Edge-list text (0-based ids). Labels are not preserved.
    pub fn to_edgelist(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            s.push_str(&format!(
                "{} {} {} {}\n",
                e.source.index(),
                e.target.index(),
                e.weight,
                e.transit
            ));
        }
        s
    }

    /// Dot text using node labels as identifiers.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph {\n");
        for u in self.nodes() {
            s.push_str(&format!("  \"{}\";\n", escape_dot(self.label(u))));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"",
                escape_dot(self.label(e.source)),
                escape_dot(self.label(e.target)),
                e.weight
            ));
            if e.transit != 1 {
                s.push_str(&format!(", transit=\"{}\"", e.transit));
            }
            s.push_str("];\n");
        }
        s.push_str("}\n");
        s
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Incremental construction with the duplicate-edge policy applied.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    edges: Vec<Edge>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
    duplicates: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes(n: usize) -> Self {
        let mut b = Self::new();
        for i in 0..n {
            b.add_node(i.to_string());
        }
        b
    }

    pub fn add_node(&mut self, label: String) -> NodeId {
        self.labels.push(label);
        NodeId::new(self.labels.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of duplicate edges merged so far.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn add_edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        weight: i64,
        transit: i64,
    ) -> crate::Result<()> {
        let n = self.labels.len();
        if source.index() >= n || target.index() >= n {
            return Err(crate::Error::Domain(format!(
                "edge ({source},{target}) out of range for {n} nodes"
            )));
        }
        if transit < 1 {
            return Err(crate::Error::Domain(format!(
                "transit weight must be >= 1, got {transit}"
            )));
        }
        match self.index.get(&(source, target)) {
            Some(&e) => {
                self.duplicates += 1;
                log::warn!(
                    "duplicate edge {} -> {}; keeping the smaller weight",
                    self.labels[source.index()],
                    self.labels[target.index()]
                );
                let old = &mut self.edges[e];
                if weight < old.weight {
                    old.weight = weight;
                    old.transit = transit;
                }
            }
            None => {
                self.index.insert((source, target), self.edges.len());
                self.edges.push(Edge {
                    source,
                    target,
                    weight,
                    transit,
                });
            }
        }
        Ok(())
    }

    fn push_edge_unchecked(&mut self, e: Edge) {
        self.index.insert((e.source, e.target), self.edges.len());
        self.edges.push(e);
    }

    pub fn build(self) -> WeightedDigraph {
        let n = self.labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.source.index()].push(i);
            inc[e.target.index()].push(i);
        }
        WeightedDigraph {
            labels: self.labels,
            edges: self.edges,
            out,
            inc,
        }
    }
}
