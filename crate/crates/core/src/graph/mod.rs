//! Undirected simple graphs carrying one binary attribute per node.

mod io;
pub mod metrics;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_attributes, load_edge_list, parse_attributes, parse_edge_list, IdStyle, LoadStats};
pub use metrics::{
    average_path_length, degree_assortativity, density, transitivity, AplMode, GraphMetrics,
    PathLengthSummary,
};

/// Dense node index in `[0, N)`.
pub type NodeId = usize;

/// One of the two attribute values. `R` is the canonical majority value and
/// `B` the minority value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttrValue {
    R,
    B,
}

impl AttrValue {
    pub fn index(self) -> usize {
        match self {
            AttrValue::R => 0,
            AttrValue::B => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            AttrValue::R => AttrValue::B,
            AttrValue::B => AttrValue::R,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttrValue::R => "R",
            AttrValue::B => "B",
        })
    }
}

/// Per-node attribute values plus the source symbols `R` and `B` stand for.
#[derive(Debug, Clone, PartialEq)]
pub struct Attributes {
    pub values: Vec<AttrValue>,
    pub symbols: [String; 2],
}

impl Attributes {
    pub fn canonical(values: Vec<AttrValue>) -> Self {
        Attributes {
            values,
            symbols: ["R".to_string(), "B".to_string()],
        }
    }

    pub fn symbol(&self, v: AttrValue) -> &str {
        &self.symbols[v.index()]
    }

    /// Node counts as `[R, B]`.
    pub fn counts(&self) -> [usize; 2] {
        let b = self.values.iter().filter(|&&v| v == AttrValue::B).count();
        [self.values.len() - b, b]
    }
}

/// Neighborhood ring at an exact hop distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hop {
    One,
    Two,
}

impl Hop {
    pub const BOTH: [Hop; 2] = [Hop::One, Hop::Two];

    pub fn number(self) -> usize {
        match self {
            Hop::One => 1,
            Hop::Two => 2,
        }
    }
}

impl TryFrom<u8> for Hop {
    type Error = Error;

    fn try_from(q: u8) -> Result<Self> {
        match q {
            1 => Ok(Hop::One),
            2 => Ok(Hop::Two),
            _ => Err(Error::invalid(format!("hop must be 1 or 2, got {q}"))),
        }
    }
}

/// Immutable undirected simple graph with sorted adjacency lists, the source
/// identifier of every node, and optionally a binary attribute per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edges: usize,
    source_ids: Vec<String>,
    attrs: Option<Attributes>,
}

impl Graph {
    /// Builds a graph on `n` nodes named `0..n`. Self-loops and repeated
    /// edges are dropped and counted.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Graph, LoadStats)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let source_ids = (0..n).map(|i| i.to_string()).collect();
        Self::build(source_ids, edges)
    }

    pub(crate) fn build<I>(source_ids: Vec<String>, edges: I) -> Result<(Graph, LoadStats)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = source_ids.len();
        let mut adj = vec![Vec::new(); n];
        let mut stats = LoadStats::default();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownNode(u.max(v).to_string()));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut total = 0;
        for list in &mut adj {
            let before = list.len();
            list.sort_unstable();
            list.dedup();
            stats.duplicates += before - list.len();
            total += list.len();
        }
        // each duplicate edge was removed from both endpoint lists
        stats.duplicates /= 2;
        let g = Graph {
            adj,
            edges: total / 2,
            source_ids,
            attrs: None,
        };
        debug_assert!(g.is_symmetric());
        Ok((g, stats))
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Every edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn source_id(&self, u: NodeId) -> &str {
        &self.source_ids[u]
    }

    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }

    pub fn is_labeled(&self) -> bool {
        self.attrs.is_some()
    }

    pub fn attributes(&self) -> Option<&Attributes> {
        self.attrs.as_ref()
    }

    pub fn attr(&self, u: NodeId) -> Result<AttrValue> {
        let attrs = self.attrs.as_ref().ok_or(Error::Unlabeled)?;
        Ok(attrs.values[u])
    }

    /// Replaces the attribute assignment; values are taken as canonical.
    pub fn with_attributes(mut self, values: Vec<AttrValue>) -> Result<Graph> {
        if values.len() != self.node_count() {
            return Err(Error::invalid(format!(
                "{} attribute values for {} nodes",
                values.len(),
                self.node_count()
            )));
        }
        let symbols = match &self.attrs {
            Some(a) => a.symbols.clone(),
            None => ["R".to_string(), "B".to_string()],
        };
        self.attrs = Some(Attributes { values, symbols });
        Ok(self)
    }

    pub(crate) fn set_attributes(&mut self, attrs: Attributes) {
        self.attrs = Some(attrs);
    }

    pub fn without_attributes(mut self) -> Graph {
        self.attrs = None;
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.adj.iter().enumerate().all(|(u, list)| {
            list.windows(2).all(|w| w[0] < w[1])
                && list.iter().all(|&v| v != u && self.has_edge(v, u))
        })
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(u.to_string()))
        }
    }

    /// Nodes at exactly distance `hop` from `u`, sorted.
    pub fn neighbors_at_hop(&self, u: NodeId, hop: Hop) -> Result<Vec<NodeId>> {
        self.check_node(u)?;
        Ok(match hop {
            Hop::One => self.adj[u].clone(),
            Hop::Two => {
                let mut ring = HopRing::new(self);
                let mut out = ring.second(u).to_vec();
                out.sort_unstable();
                out
            }
        })
    }

    /// Subgraph induced by `nodes`; node `nodes[i]` becomes node `i` and keeps
    /// its source id and attribute.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Graph {
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
        }
        let mut edges = 0;
        let adj: Vec<Vec<NodeId>> = nodes
            .iter()
            .map(|&u| {
                let mut list: Vec<NodeId> = self.adj[u]
                    .iter()
                    .filter_map(|&v| (local[v] != usize::MAX).then_some(local[v]))
                    .collect();
                list.sort_unstable();
                edges += list.len();
                list
            })
            .collect();
        Graph {
            adj,
            edges: edges / 2,
            source_ids: nodes.iter().map(|&u| self.source_ids[u].clone()).collect(),
            attrs: self.attrs.as_ref().map(|a| Attributes {
                values: nodes.iter().map(|&u| a.values[u]).collect(),
                symbols: a.symbols.clone(),
            }),
        }
    }
}

/// Reusable scratch space for exact-distance-2 rings.
pub struct HopRing<'g> {
    graph: &'g Graph,
    stamp: Vec<u32>,
    epoch: u32,
    buf: Vec<NodeId>,
}

impl<'g> HopRing<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        HopRing {
            graph,
            stamp: vec![0; graph.node_count()],
            epoch: 0,
            buf: Vec::new(),
        }
    }

    /// Nodes at distance exactly 2 from `u`, in discovery order.
    pub fn second(&mut self, u: NodeId) -> &[NodeId] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let e = self.epoch;
        self.buf.clear();
        self.stamp[u] = e;
        for &v in self.graph.neighbors(u) {
            self.stamp[v] = e;
        }
        for &v in self.graph.neighbors(u) {
            for &w in self.graph.neighbors(v) {
                if self.stamp[w] != e {
                    self.stamp[w] = e;
                    self.buf.push(w);
                }
            }
        }
        &self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap().0
    }

    #[test]
    fn from_edges_drops_loops_and_duplicates() {
        let (g, stats) = Graph::from_edges(2, [(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(stats.self_loops, 1);
        assert!(g.is_symmetric());
    }

    #[test]
    fn hop_rings() {
        let g = path3();
        assert_eq!(g.neighbors_at_hop(0, Hop::Two).unwrap(), vec![2]);
        assert_eq!(g.neighbors_at_hop(0, Hop::One).unwrap(), vec![1]);
        let (k3, _) = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(k3.neighbors_at_hop(0, Hop::Two).unwrap().is_empty());
        assert!(matches!(g.neighbors_at_hop(7, Hop::One), Err(Error::UnknownNode(_))));
        assert!(Hop::try_from(3).is_err());
    }

    #[test]
    fn induced_subgraph_keeps_attributes() {
        let g = path3()
            .with_attributes(vec![AttrValue::R, AttrValue::B, AttrValue::R])
            .unwrap();
        let sub = g.induced_subgraph(&[2, 1]);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.source_id(0), "2");
        assert_eq!(sub.attr(1).unwrap(), AttrValue::B);
        assert!(sub.has_edge(0, 1));
    }

    #[test]
    fn unlabeled_attr_is_an_error() {
        assert!(matches!(path3().attr(0), Err(Error::Unlabeled)));
    }
}
