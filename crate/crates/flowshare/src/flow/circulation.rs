//! Feasible flows under lower bounds, via the excess/deficit
//! super-source reduction.

use super::graph::{DirectedGraph, EdgeId, NodeId};
use super::maxflow::{augment_to_max, AugmentOrder};
use super::network::{Bound, BoundedNetwork, Flow};
use super::FlowError;
use crate::rat::Rat;
use std::fmt;

/// Target value for [`feasible_circulation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Required {
    /// A flow of exactly this source-to-sink value.
    Exact(Rat),
    /// The maximum-value feasible flow.
    Maximize,
    /// Any feasible flow, regardless of value.
    Any,
}

/// Certificate that no feasible flow exists: a node set whose forced
/// inflow (sum of lower bounds on entering edges, including the implicit
/// return edge carrying the required value) exceeds the capacity leaving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCut {
    /// Violated node set, ascending.
    pub nodes: Vec<NodeId>,
    /// Sum of lower bounds over edges entering the set.
    pub lower_in: Rat,
    /// Sum of upper bounds over edges leaving the set (finite by
    /// construction, otherwise the set could not be violated).
    pub upper_out: Rat,
}

impl InfeasibilityCut {
    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.binary_search(&n).is_ok()
    }
}

impl fmt::Display for InfeasibilityCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes {:?} require inflow {} but can emit at most {}",
            self.nodes.iter().map(|n| n.0).collect::<Vec<_>>(),
            self.lower_in,
            self.upper_out
        )
    }
}

/// Computes a feasible flow meeting every lower bound, with the requested
/// source-to-sink value, or returns a violated-cut certificate.
///
/// The reduction is standard: each edge keeps capacity `u - l`, the lower
/// bounds become node excesses served by a super source/sink pair, and the
/// required value rides on an implicit sink-to-source return edge. The
/// certificate falls out of the final residual cut.
pub fn feasible_circulation(net: &BoundedNetwork, required: Required) -> Result<Flow, FlowError> {
    feasible_circulation_with_order(net, required, &AugmentOrder::lexicographic())
}

/// [`feasible_circulation`] with an explicit arc-scanning order.
pub fn feasible_circulation_with_order(
    net: &BoundedNetwork,
    required: Required,
    order: &AugmentOrder,
) -> Result<Flow, FlowError> {
    if let Required::Exact(w) = &required {
        if w.is_negative() {
            return Err(FlowError::InvalidInput(format!(
                "required value {w} is negative"
            )));
        }
    }

    let m = net.edge_count();
    let n = net.node_count();

    // Node excesses from lower bounds: ex(v) = sum of lower over entering
    // edges minus sum over leaving edges. The pinned return edge (required
    // exact value) contributes directly to the excesses of source and sink.
    let mut excess = vec![Rat::zero(); n];
    for e in net.graph().edge_ids() {
        let l = net.lower(e);
        if !l.is_zero() {
            excess[net.graph().head(e).index()] += l;
            excess[net.graph().tail(e).index()] -= l;
        }
    }
    if let Required::Exact(w) = &required {
        excess[net.source().index()] += w;
        excess[net.sink().index()] -= w;
    }

    // Reduction network: original edges with capacity u - l, an optional
    // free return edge for Maximize/Any, then super-source/super-sink arcs.
    let mut graph = DirectedGraph::new();
    for v in net.graph().node_ids() {
        graph.add_node(net.graph().label(v));
    }
    let super_source = graph.add_node("super_source");
    let super_sink = graph.add_node("super_sink");

    let mut upper: Vec<Bound> = Vec::with_capacity(m + n + 1);
    for e in net.graph().edge_ids() {
        let cap = match net.upper(e) {
            Bound::Finite(u) => Bound::Finite(u - net.lower(e)),
            Bound::Infinite => Bound::Infinite,
        };
        graph.add_edge(net.graph().tail(e), net.graph().head(e))?;
        upper.push(cap);
    }
    if !matches!(required, Required::Exact(_)) {
        graph.add_edge(net.sink(), net.source())?;
        upper.push(Bound::Infinite);
    }
    let mut total_excess = Rat::zero();
    for v in net.graph().node_ids() {
        let ex = &excess[v.index()];
        if ex.is_positive() {
            graph.add_edge(super_source, v)?;
            upper.push(Bound::Finite(ex.clone()));
            total_excess += ex;
        } else if ex.is_negative() {
            graph.add_edge(v, super_sink)?;
            upper.push(Bound::Finite(-ex));
        }
    }

    let reduction =
        BoundedNetwork::with_upper_bounds(graph, upper, super_source, super_sink)?;
    let mut values = vec![Rat::zero(); reduction.edge_count()];
    let pushed = augment_to_max(
        &reduction,
        &mut values,
        super_source,
        super_sink,
        order,
        None,
        None,
    )?;

    if pushed != total_excess {
        return Err(FlowError::Infeasible(extract_cut(
            net, &required, &reduction, &values,
        )));
    }

    // Lift back: f_e = l_e + reduction flow on e.
    let mut flow_values: Vec<Rat> = (0..m)
        .map(|i| net.lower(EdgeId(i as u32)) + &values[i])
        .collect();

    if matches!(required, Required::Maximize) {
        // Phase 2: drop the return edge and push real source-to-sink flow.
        augment_to_max(
            net,
            &mut flow_values,
            net.source(),
            net.sink(),
            order,
            None,
            None,
        )?;
    }

    let flow = Flow::from_values(net, flow_values);
    debug_assert!(flow.validate(net).is_ok());
    if let Required::Exact(w) = &required {
        debug_assert_eq!(flow.value(), w);
    }
    Ok(flow)
}

/// Derives the violated node set from the reduction's final residual graph:
/// the original-node part of the super-source side satisfies
/// `lower_in > upper_out` by max-flow/min-cut.
fn extract_cut(
    net: &BoundedNetwork,
    required: &Required,
    reduction: &BoundedNetwork,
    values: &[Rat],
) -> InfeasibilityCut {
    use std::collections::VecDeque;
    let mut seen = vec![false; reduction.node_count()];
    seen[reduction.source().index()] = true;
    let mut queue = VecDeque::from([reduction.source()]);
    while let Some(u) = queue.pop_front() {
        for arc in reduction.arcs_from(u) {
            let has_residual = if arc.forward {
                match reduction.upper(arc.edge) {
                    Bound::Finite(cap) => &values[arc.edge.index()] < cap,
                    Bound::Infinite => true,
                }
            } else {
                values[arc.edge.index()].is_positive()
            };
            if !has_residual {
                continue;
            }
            let v = reduction.arc_target(*arc);
            if !seen[v.index()] {
                seen[v.index()] = true;
                queue.push_back(v);
            }
        }
    }

    let nodes: Vec<NodeId> = net
        .graph()
        .node_ids()
        .filter(|v| seen[v.index()])
        .collect();
    let inside = |v: NodeId| seen[v.index()];

    let mut lower_in = Rat::zero();
    let mut upper_out = Rat::zero();
    for e in net.graph().edge_ids() {
        let tail_in = inside(net.graph().tail(e));
        let head_in = inside(net.graph().head(e));
        if head_in && !tail_in {
            lower_in += net.lower(e);
        } else if tail_in && !head_in {
            match net.upper(e) {
                Bound::Finite(u) => upper_out += u,
                Bound::Infinite => {
                    debug_assert!(false, "violated cut crossed by infinite edge");
                }
            }
        }
    }
    // Implicit return edge sink -> source.
    let (ret_l, ret_u) = match required {
        Required::Exact(w) => (w.clone(), w.clone()),
        Required::Maximize | Required::Any => (Rat::zero(), Rat::zero()),
    };
    if inside(net.source()) && !inside(net.sink()) {
        lower_in += ret_l;
    } else if inside(net.sink()) && !inside(net.source()) {
        upper_out += ret_u;
    }

    debug_assert!(lower_in > upper_out, "cut certificate not violated");
    InfeasibilityCut {
        nodes,
        lower_in,
        upper_out,
    }
}
