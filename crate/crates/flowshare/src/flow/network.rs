//! Capacitated networks and flows.

use super::graph::{DirectedGraph, EdgeId, NodeId};
use super::FlowError;
use crate::rat::Rat;
use std::cmp::Ordering;
use std::fmt;

/// Upper capacity of an edge: a finite rational or unbounded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Bound {
    Finite(Rat),
    Infinite,
}

impl Bound {
    pub fn finite(r: Rat) -> Self {
        Bound::Finite(r)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Bound::Finite(r) => Some(r),
            Bound::Infinite => None,
        }
    }

    /// `self < r`, treating `Infinite` as larger than every rational.
    pub fn lt_rat(&self, r: &Rat) -> bool {
        match self {
            Bound::Finite(b) => b < r,
            Bound::Infinite => false,
        }
    }

    pub fn min_with(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Infinite, b) | (b, Bound::Infinite) => b,
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a.min(b)),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Bound) -> Option<Ordering> {
        match (self, other) {
            (Bound::Infinite, Bound::Infinite) => Some(Ordering::Equal),
            (Bound::Infinite, Bound::Finite(_)) => Some(Ordering::Greater),
            (Bound::Finite(_), Bound::Infinite) => Some(Ordering::Less),
            (Bound::Finite(a), Bound::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

/// One residual arc: an original edge traversed forward (capacity `u - f`)
/// or backward (capacity `f - l`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResArc {
    pub edge: EdgeId,
    pub forward: bool,
}

/// A directed graph with per-edge lower/upper capacity bounds and designated
/// source and sink.
///
/// Adjacency (residual arcs per node, ordered by edge id) is precomputed at
/// construction; networks are immutable afterwards, which is what makes the
/// augmenting-order rule of the solvers deterministic.
#[derive(Debug, Clone)]
pub struct BoundedNetwork {
    graph: DirectedGraph,
    lower: Vec<Rat>,
    upper: Vec<Bound>,
    source: NodeId,
    sink: NodeId,
    adjacency: Vec<Vec<ResArc>>,
}

impl BoundedNetwork {
    pub fn new(
        graph: DirectedGraph,
        lower: Vec<Rat>,
        upper: Vec<Bound>,
        source: NodeId,
        sink: NodeId,
    ) -> Result<Self, FlowError> {
        let m = graph.edge_count();
        if lower.len() != m || upper.len() != m {
            return Err(FlowError::InvalidInput(format!(
                "bound vectors must have one entry per edge ({m})"
            )));
        }
        if source == sink {
            return Err(FlowError::InvalidInput("source equals sink".into()));
        }
        if source.index() >= graph.node_count() || sink.index() >= graph.node_count() {
            return Err(FlowError::InvalidInput(
                "source or sink is not a node of the graph".into(),
            ));
        }
        for e in graph.edge_ids() {
            let l = &lower[e.index()];
            if l.is_negative() {
                return Err(FlowError::InvalidInput(format!(
                    "edge {e}: lower bound {l} is negative"
                )));
            }
            if upper[e.index()].lt_rat(l) {
                return Err(FlowError::InvalidInput(format!(
                    "edge {e}: upper bound {} below lower bound {l}",
                    upper[e.index()]
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); graph.node_count()];
        for e in graph.edge_ids() {
            adjacency[graph.tail(e).index()].push(ResArc {
                edge: e,
                forward: true,
            });
            adjacency[graph.head(e).index()].push(ResArc {
                edge: e,
                forward: false,
            });
        }
        // add_edge appends in id order, so each list is already sorted.
        Ok(BoundedNetwork {
            graph,
            lower,
            upper,
            source,
            sink,
            adjacency,
        })
    }

    /// All lower bounds zero.
    pub fn with_upper_bounds(
        graph: DirectedGraph,
        upper: Vec<Bound>,
        source: NodeId,
        sink: NodeId,
    ) -> Result<Self, FlowError> {
        let m = graph.edge_count();
        Self::new(graph, vec![Rat::zero(); m], upper, source, sink)
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn lower(&self, e: EdgeId) -> &Rat {
        &self.lower[e.index()]
    }

    pub fn upper(&self, e: EdgeId) -> &Bound {
        &self.upper[e.index()]
    }

    pub fn lowers(&self) -> &[Rat] {
        &self.lower
    }

    pub fn uppers(&self) -> &[Bound] {
        &self.upper
    }

    pub fn arcs_from(&self, n: NodeId) -> &[ResArc] {
        &self.adjacency[n.index()]
    }

    pub fn all_lower_zero(&self) -> bool {
        self.lower.iter().all(Rat::is_zero)
    }

    /// Same graph with different bounds; adjacency is rebuilt cheaply.
    pub fn with_bounds(&self, lower: Vec<Rat>, upper: Vec<Bound>) -> Result<Self, FlowError> {
        Self::new(self.graph.clone(), lower, upper, self.source, self.sink)
    }

    /// The node an arc leads to when traversed in its residual direction.
    pub fn arc_target(&self, arc: ResArc) -> NodeId {
        if arc.forward {
            self.graph.head(arc.edge)
        } else {
            self.graph.tail(arc.edge)
        }
    }
}

/// A feasible flow on a [`BoundedNetwork`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    values: Vec<Rat>,
    value: Rat,
}

impl Flow {
    /// Wraps per-edge values, computing the flow value (net out of the
    /// source). Does not check feasibility; see [`Flow::validate`].
    pub fn from_values(net: &BoundedNetwork, values: Vec<Rat>) -> Self {
        assert_eq!(values.len(), net.edge_count());
        let value = net_out_of(net, &values, net.source());
        Flow { values, value }
    }

    pub fn zero(net: &BoundedNetwork) -> Self {
        Flow {
            values: vec![Rat::zero(); net.edge_count()],
            value: Rat::zero(),
        }
    }

    pub fn edge_value(&self, e: EdgeId) -> &Rat {
        &self.values[e.index()]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn into_values(self) -> Vec<Rat> {
        self.values
    }

    /// Residual capacity of `e` in the forward direction: `u - f`.
    pub fn residual_forward(&self, net: &BoundedNetwork, e: EdgeId) -> Bound {
        match net.upper(e) {
            Bound::Finite(u) => Bound::Finite(u - &self.values[e.index()]),
            Bound::Infinite => Bound::Infinite,
        }
    }

    /// Residual capacity of `e` in the backward direction: `f - l`.
    pub fn residual_backward(&self, net: &BoundedNetwork, e: EdgeId) -> Rat {
        &self.values[e.index()] - net.lower(e)
    }

    /// Exact feasibility check: bounds on every edge, conservation at every
    /// node except source and sink, and value consistency at the sink.
    pub fn validate(&self, net: &BoundedNetwork) -> Result<(), FlowError> {
        if self.values.len() != net.edge_count() {
            return Err(FlowError::InvalidInput(
                "flow length does not match edge count".into(),
            ));
        }
        for e in net.graph().edge_ids() {
            let f = &self.values[e.index()];
            if f < net.lower(e) {
                return Err(FlowError::InvalidInput(format!(
                    "edge {e}: flow {f} below lower bound {}",
                    net.lower(e)
                )));
            }
            if net.upper(e).lt_rat(f) {
                return Err(FlowError::InvalidInput(format!(
                    "edge {e}: flow {f} above upper bound {}",
                    net.upper(e)
                )));
            }
        }
        for n in net.graph().node_ids() {
            if n == net.source() || n == net.sink() {
                continue;
            }
            let imbalance = net_out_of(net, &self.values, n);
            if !imbalance.is_zero() {
                return Err(FlowError::InvalidInput(format!(
                    "conservation violated at node {n}: net outflow {imbalance}"
                )));
            }
        }
        let into_sink = -net_out_of(net, &self.values, net.sink());
        if into_sink != self.value {
            return Err(FlowError::InvalidInput(format!(
                "flow value {} does not match net flow into sink {into_sink}",
                self.value
            )));
        }
        Ok(())
    }
}

fn net_out_of(net: &BoundedNetwork, values: &[Rat], n: NodeId) -> Rat {
    let mut total = Rat::zero();
    for arc in net.arcs_from(n) {
        if arc.forward {
            total += &values[arc.edge.index()];
        } else {
            total -= &values[arc.edge.index()];
        }
    }
    total
}

/// A source-to-sink path carrying a positive amount of flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFlow {
    pub edges: Vec<EdgeId>,
    pub amount: Rat,
}
