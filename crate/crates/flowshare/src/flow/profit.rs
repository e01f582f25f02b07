//! Maximum-profit flow: maximize the profit-weighted sum of edge flows,
//! with the flow value left free.

use super::circulation::{feasible_circulation_with_order, Required};
use super::graph::NodeId;
use super::maxflow::AugmentOrder;
use super::network::{Bound, BoundedNetwork, Flow, ResArc};
use super::FlowError;
use crate::rat::Rat;

/// Returns a feasible flow maximizing `sum_e profit[e] * f[e]`.
///
/// Profits must be non-negative. The solver cancels positive-profit residual
/// cycles first, then augments along most-profitable residual source-to-sink
/// paths while their profit is strictly positive (zero-profit paths are
/// never used, so unprofitable edges stay at their lower bounds). Support
/// cycles of zero-profit edges are canceled before returning; saturated
/// positive-profit cycles, where the input graph has them, are genuine
/// profit and remain.
pub fn max_profit_flow(net: &BoundedNetwork, profit: &[Rat]) -> Result<Flow, FlowError> {
    if profit.len() != net.edge_count() {
        return Err(FlowError::InvalidInput(
            "profit vector must have one entry per edge".into(),
        ));
    }
    if let Some(i) = profit.iter().position(|p| p.is_negative()) {
        return Err(FlowError::InvalidInput(format!(
            "profit of edge {i} is negative"
        )));
    }

    let order = AugmentOrder::lexicographic();
    let mut values = if net.all_lower_zero() {
        vec![Rat::zero(); net.edge_count()]
    } else {
        feasible_circulation_with_order(net, Required::Any, &order)?.into_values()
    };

    cancel_positive_cycles(net, profit, &mut values)?;

    // Most-profitable-path phases, in both directions: raising the value
    // along profitable forward routes and lowering it along profitable
    // reverse routes both increase the objective. Augmenting along a
    // maximum-profit path between fixed endpoints keeps the residual graph
    // free of positive-profit cycles, so plain Bellman-Ford distances stay
    // well defined throughout.
    let endpoints = [(net.source(), net.sink()), (net.sink(), net.source())];
    'phases: loop {
        for (from, to) in endpoints {
            let Some(path) = best_path(net, profit, &values, from, to)? else {
                continue;
            };
            if !path.profit.is_positive() {
                continue;
            }
            let mut bottleneck = Bound::Infinite;
            for arc in &path.arcs {
                bottleneck = bottleneck.min_with(residual(net, &values, *arc));
            }
            let amount = match bottleneck {
                Bound::Finite(b) => b,
                Bound::Infinite => return Err(FlowError::UnboundedObjective),
            };
            debug_assert!(amount.is_positive());
            for arc in &path.arcs {
                apply(&mut values, *arc, &amount);
            }
            continue 'phases;
        }
        break;
    }

    cancel_zero_profit_support_cycles(net, profit, &mut values);

    let flow = Flow::from_values(net, values);
    debug_assert!(flow.validate(net).is_ok());
    debug_assert!(verify_profit_optimal(net, profit, &flow));
    Ok(flow)
}

/// Optimality certificate: no residual cycle and no residual path between
/// the terminals (in either direction) with strictly positive profit.
pub fn verify_profit_optimal(net: &BoundedNetwork, profit: &[Rat], flow: &Flow) -> bool {
    if cycle_scan(net, profit, flow.values()).is_some() {
        return false;
    }
    for (from, to) in [(net.source(), net.sink()), (net.sink(), net.source())] {
        match best_path(net, profit, flow.values(), from, to) {
            Ok(Some(path)) if path.profit.is_positive() => return false,
            Ok(_) => {}
            Err(_) => return false,
        }
    }
    true
}

fn residual(net: &BoundedNetwork, values: &[Rat], arc: ResArc) -> Bound {
    if arc.forward {
        match net.upper(arc.edge) {
            Bound::Finite(u) => Bound::Finite(u - &values[arc.edge.index()]),
            Bound::Infinite => Bound::Infinite,
        }
    } else {
        Bound::Finite(&values[arc.edge.index()] - net.lower(arc.edge))
    }
}

fn has_residual(net: &BoundedNetwork, values: &[Rat], arc: ResArc) -> bool {
    if arc.forward {
        match net.upper(arc.edge) {
            Bound::Finite(u) => &values[arc.edge.index()] < u,
            Bound::Infinite => true,
        }
    } else {
        &values[arc.edge.index()] > net.lower(arc.edge)
    }
}

fn arc_profit(profit: &[Rat], arc: ResArc) -> Rat {
    if arc.forward {
        profit[arc.edge.index()].clone()
    } else {
        -&profit[arc.edge.index()]
    }
}

fn apply(values: &mut [Rat], arc: ResArc, amount: &Rat) {
    if arc.forward {
        values[arc.edge.index()] += amount;
    } else {
        values[arc.edge.index()] -= amount;
    }
}

/// All residual arcs in deterministic order: ascending edge id, forward
/// before backward.
fn residual_arcs(net: &BoundedNetwork) -> Vec<ResArc> {
    let mut arcs = Vec::with_capacity(2 * net.edge_count());
    for e in net.graph().edge_ids() {
        arcs.push(ResArc {
            edge: e,
            forward: true,
        });
        arcs.push(ResArc {
            edge: e,
            forward: false,
        });
    }
    arcs
}

fn arc_source(net: &BoundedNetwork, arc: ResArc) -> NodeId {
    if arc.forward {
        net.graph().tail(arc.edge)
    } else {
        net.graph().head(arc.edge)
    }
}

/// One Bellman-Ford sweep with all nodes as roots; returns a node whose
/// distance still improves after `n` passes, i.e. a witness that a
/// positive-profit residual cycle exists, together with the predecessor
/// arcs.
fn cycle_scan(
    net: &BoundedNetwork,
    profit: &[Rat],
    values: &[Rat],
) -> Option<(NodeId, Vec<Option<ResArc>>)> {
    let n = net.node_count();
    let arcs = residual_arcs(net);
    let mut dist = vec![Rat::zero(); n];
    let mut pred: Vec<Option<ResArc>> = vec![None; n];
    for pass in 0..=n {
        let mut improved = None;
        for &arc in &arcs {
            if !has_residual(net, values, arc) {
                continue;
            }
            let from = arc_source(net, arc);
            let to = net.arc_target(arc);
            let cand = &dist[from.index()] + arc_profit(profit, arc);
            if cand > dist[to.index()] {
                dist[to.index()] = cand;
                pred[to.index()] = Some(arc);
                improved = Some(to);
            }
        }
        match improved {
            None => return None,
            Some(node) if pass == n => return Some((node, pred)),
            Some(_) => {}
        }
    }
    unreachable!("loop covers pass == n")
}

fn cancel_positive_cycles(
    net: &BoundedNetwork,
    profit: &[Rat],
    values: &mut [Rat],
) -> Result<(), FlowError> {
    while let Some((start, pred)) = cycle_scan(net, profit, values) {
        // Walk predecessors n times to land on the cycle, then collect it.
        let mut cursor = start;
        for _ in 0..net.node_count() {
            cursor = arc_source(net, pred[cursor.index()].expect("improved node has pred"));
        }
        let mut cycle = Vec::new();
        let anchor = cursor;
        loop {
            let arc = pred[cursor.index()].expect("cycle node has pred");
            cycle.push(arc);
            cursor = arc_source(net, arc);
            if cursor == anchor {
                break;
            }
        }
        cycle.reverse();
        let mut bottleneck = Bound::Infinite;
        for arc in &cycle {
            bottleneck = bottleneck.min_with(residual(net, values, *arc));
        }
        let amount = match bottleneck {
            Bound::Finite(b) => b,
            Bound::Infinite => return Err(FlowError::UnboundedObjective),
        };
        debug_assert!(amount.is_positive());
        for arc in &cycle {
            apply(values, *arc, &amount);
        }
    }
    Ok(())
}

struct BestPath {
    arcs: Vec<ResArc>,
    profit: Rat,
}

/// Maximum-profit residual path from `from` to `to` (Bellman-Ford,
/// deterministic arc order, strict improvements only). Assumes no
/// positive-profit residual cycle. Returns `None` when `to` is unreachable.
fn best_path(
    net: &BoundedNetwork,
    profit: &[Rat],
    values: &[Rat],
    from: NodeId,
    to: NodeId,
) -> Result<Option<BestPath>, FlowError> {
    let n = net.node_count();
    let arcs = residual_arcs(net);
    let mut dist: Vec<Option<Rat>> = vec![None; n];
    dist[from.index()] = Some(Rat::zero());
    let mut pred: Vec<Option<ResArc>> = vec![None; n];
    for _ in 0..n {
        let mut improved = false;
        for &arc in &arcs {
            if !has_residual(net, values, arc) {
                continue;
            }
            let src = arc_source(net, arc);
            let Some(base) = dist[src.index()].clone() else {
                continue;
            };
            let cand = base + arc_profit(profit, arc);
            let better = match &dist[net.arc_target(arc).index()] {
                Some(cur) => &cand > cur,
                None => true,
            };
            if better {
                let tgt = net.arc_target(arc);
                dist[tgt.index()] = Some(cand);
                pred[tgt.index()] = Some(arc);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let Some(total) = dist[to.index()].clone() else {
        return Ok(None);
    };
    let mut arcs_on_path = Vec::new();
    let mut cursor = to;
    while cursor != from {
        let arc = pred[cursor.index()].expect("reached node has pred");
        arcs_on_path.push(arc);
        cursor = arc_source(net, arc);
    }
    arcs_on_path.reverse();
    Ok(Some(BestPath {
        arcs: arcs_on_path,
        profit: total,
    }))
}

/// Removes circulation on cycles of zero-profit support edges. Profits are
/// non-negative, so a support cycle has total profit zero exactly when all
/// of its edges have profit zero; reducing it changes neither feasibility
/// nor the objective, and path decomposition needs it gone.
fn cancel_zero_profit_support_cycles(net: &BoundedNetwork, profit: &[Rat], values: &mut [Rat]) {
    loop {
        let Some(cycle) = find_reducible_cycle(net, profit, values) else {
            return;
        };
        let amount = cycle
            .iter()
            .map(|arc| &values[arc.edge.index()] - net.lower(arc.edge))
            .min()
            .expect("cycle nonempty");
        debug_assert!(amount.is_positive());
        for arc in &cycle {
            values[arc.edge.index()] -= &amount;
        }
    }
}

/// Finds a directed cycle in the subgraph of zero-profit edges with
/// `f > l`, by iterative DFS in ascending edge-id order.
fn find_reducible_cycle(
    net: &BoundedNetwork,
    profit: &[Rat],
    values: &[Rat],
) -> Option<Vec<ResArc>> {
    let n = net.node_count();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let eligible = |arc: &ResArc| {
        arc.forward
            && profit[arc.edge.index()].is_zero()
            && &values[arc.edge.index()] > net.lower(arc.edge)
    };
    for root in net.graph().node_ids() {
        if state[root.index()] != 0 {
            continue;
        }
        let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
        let mut path: Vec<ResArc> = Vec::new();
        state[root.index()] = 1;
        while let Some((node, arc_idx)) = stack.pop() {
            let arcs = net.arcs_from(node);
            let mut advanced = false;
            for (i, arc) in arcs.iter().enumerate().skip(arc_idx) {
                if !eligible(arc) {
                    continue;
                }
                let next = net.graph().head(arc.edge);
                match state[next.index()] {
                    1 => {
                        // Found a cycle: trim the path back to `next`.
                        path.push(*arc);
                        let start = path
                            .iter()
                            .position(|a| arc_source(net, *a) == next)
                            .expect("cycle start on path");
                        return Some(path[start..].to_vec());
                    }
                    0 => {
                        stack.push((node, i + 1));
                        path.push(*arc);
                        state[next.index()] = 1;
                        stack.push((next, 0));
                        advanced = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !advanced {
                state[node.index()] = 2;
                path.pop();
            }
        }
    }
    None
}
