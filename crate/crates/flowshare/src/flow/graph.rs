//! Directed multigraph with dense node/edge ids.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Dense node index, `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

/// Dense edge index, `0..m`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge endpoint references unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loops are not allowed (node {0})")]
    SelfLoop(NodeId),
}

/// Directed graph with string labels. Parallel edges are allowed,
/// self-loops are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
}

impl DirectedGraph {
    pub fn new() -> Self {
        DirectedGraph {
            labels: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> NodeId {
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.into());
        id
    }

    pub fn add_edge(&mut self, tail: NodeId, head: NodeId) -> Result<EdgeId, GraphError> {
        let n = self.labels.len();
        if tail.index() >= n {
            return Err(GraphError::UnknownNode(tail));
        }
        if head.index() >= n {
            return Err(GraphError::UnknownNode(head));
        }
        if tail == head {
            return Err(GraphError::SelfLoop(tail));
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push((tail, head));
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tail(&self, e: EdgeId) -> NodeId {
        self.edges[e.index()].0
    }

    pub fn head(&self, e: EdgeId) -> NodeId {
        self.edges[e.index()].1
    }

    pub fn label(&self, n: NodeId) -> &str {
        &self.labels[n.index()]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    /// Undirected neighborhood of `n`: every node sharing an edge with `n`,
    /// in ascending order without duplicates.
    pub fn neighborhood(&self, n: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter_map(|&(t, h)| {
                if t == n {
                    Some(h)
                } else if h == n {
                    Some(t)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Default for DirectedGraph {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_unknown_nodes() {
        let mut g = DirectedGraph::new();
        let a = g.add_node("a");
        let b = g.add_node("b");
        assert!(g.add_edge(a, a).is_err());
        assert!(g.add_edge(a, NodeId(7)).is_err());
        let e = g.add_edge(a, b).unwrap();
        assert_eq!(g.tail(e), a);
        assert_eq!(g.head(e), b);
    }

    #[test]
    fn parallel_edges_get_distinct_ids() {
        let mut g = DirectedGraph::new();
        let a = g.add_node("a");
        let b = g.add_node("b");
        let e0 = g.add_edge(a, b).unwrap();
        let e1 = g.add_edge(a, b).unwrap();
        assert_ne!(e0, e1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn neighborhood_is_sorted_and_deduped() {
        let mut g = DirectedGraph::new();
        let a = g.add_node("a");
        let b = g.add_node("b");
        let c = g.add_node("c");
        g.add_edge(a, b).unwrap();
        g.add_edge(b, a).unwrap();
        g.add_edge(c, b).unwrap();
        assert_eq!(g.neighborhood(b), vec![a, c]);
    }
}
