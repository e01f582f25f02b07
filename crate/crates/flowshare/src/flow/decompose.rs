//! Deterministic decomposition of an acyclic flow into source-to-sink
//! paths.

use super::graph::{EdgeId, NodeId};
use super::network::{BoundedNetwork, Flow, PathFlow};
use super::FlowError;
use crate::rat::Rat;

/// Splits `flow` into positive-amount source-to-sink paths whose per-edge
/// sums reproduce the flow exactly.
///
/// Deterministic rule: repeatedly walk from the source taking the
/// lowest-edge-id outgoing edge that still carries flow; the extracted
/// amount is the minimum remaining flow along the walk.
///
/// Flows whose support contains a directed cycle are rejected rather than
/// silently canceled.
pub fn decompose_paths(flow: &Flow, net: &BoundedNetwork) -> Result<Vec<PathFlow>, FlowError> {
    if let Some(node) = support_cycle(flow, net) {
        return Err(FlowError::CyclicSupport(node));
    }

    let mut remaining: Vec<Rat> = flow.values().to_vec();
    let mut paths = Vec::new();

    loop {
        let Some(first) = lowest_positive_out(net, &remaining, net.source()) else {
            break;
        };
        let mut edges = vec![first];
        let mut cursor = net.graph().head(first);
        while cursor != net.sink() {
            let Some(next) = lowest_positive_out(net, &remaining, cursor) else {
                // Conservation guarantees an outgoing edge at interior
                // nodes; reaching here means the input was not a flow.
                return Err(FlowError::StrandedFlow(*edges.last().expect("nonempty")));
            };
            edges.push(next);
            cursor = net.graph().head(next);
        }
        let amount = edges
            .iter()
            .map(|e| remaining[e.index()].clone())
            .min()
            .expect("path has at least one edge");
        debug_assert!(amount.is_positive());
        for e in &edges {
            remaining[e.index()] -= &amount;
        }
        paths.push(PathFlow { edges, amount });
    }

    if let Some(e) = remaining.iter().position(|r| !r.is_zero()) {
        return Err(FlowError::StrandedFlow(EdgeId(e as u32)));
    }
    Ok(paths)
}

fn lowest_positive_out(net: &BoundedNetwork, remaining: &[Rat], n: NodeId) -> Option<EdgeId> {
    net.arcs_from(n)
        .iter()
        .filter(|a| a.forward && remaining[a.edge.index()].is_positive())
        .map(|a| a.edge)
        .min()
}

/// Kahn's algorithm on the support subgraph; returns a node on a cycle if
/// one exists.
fn support_cycle(flow: &Flow, net: &BoundedNetwork) -> Option<NodeId> {
    let n = net.node_count();
    let mut indegree = vec![0usize; n];
    let mut active_node = vec![false; n];
    for e in net.graph().edge_ids() {
        if flow.edge_value(e).is_positive() {
            indegree[net.graph().head(e).index()] += 1;
            active_node[net.graph().head(e).index()] = true;
            active_node[net.graph().tail(e).index()] = true;
        }
    }
    let mut stack: Vec<NodeId> = net
        .graph()
        .node_ids()
        .filter(|v| active_node[v.index()] && indegree[v.index()] == 0)
        .collect();
    let mut removed = 0usize;
    let total_active = active_node.iter().filter(|&&a| a).count();
    while let Some(u) = stack.pop() {
        removed += 1;
        for arc in net.arcs_from(u) {
            if arc.forward && flow.edge_value(arc.edge).is_positive() {
                let h = net.graph().head(arc.edge);
                indegree[h.index()] -= 1;
                if indegree[h.index()] == 0 {
                    stack.push(h);
                }
            }
        }
    }
    if removed == total_active {
        None
    } else {
        net.graph()
            .node_ids()
            .find(|v| active_node[v.index()] && indegree[v.index()] > 0)
    }
}
