//! Maximizing the flow on one edge among all feasible flows of a fixed
//! value.

use super::circulation::{feasible_circulation_with_order, Required};
use super::graph::EdgeId;
use super::maxflow::{augment_to_max, AugmentOrder};
use super::network::{Bound, BoundedNetwork, Flow};
use super::FlowError;
use crate::rat::Rat;

/// Maximum of `f[target]` over all feasible flows of exactly
/// `required_value`.
///
/// Starts from any feasible flow and augments along residual cycles through
/// the target edge (equivalently: maximum flow from the target's head back
/// to its tail in the residual graph with the target excluded). Cycles keep
/// the value fixed, so the result is exact.
pub fn max_edge_objective(
    net: &BoundedNetwork,
    target: EdgeId,
    required_value: Rat,
) -> Result<Rat, FlowError> {
    max_edge_objective_with_witness(net, target, required_value).map(|(v, _)| v)
}

/// [`max_edge_objective`] returning the flow that attains the maximum.
pub fn max_edge_objective_with_witness(
    net: &BoundedNetwork,
    target: EdgeId,
    required_value: Rat,
) -> Result<(Rat, Flow), FlowError> {
    if target.index() >= net.edge_count() {
        return Err(FlowError::InvalidInput(format!(
            "target edge {target} out of range"
        )));
    }
    let order = AugmentOrder::lexicographic();
    let start = feasible_circulation_with_order(net, Required::Exact(required_value), &order)?;
    let mut values = start.into_values();

    let headroom = match net.upper(target) {
        Bound::Finite(u) => Some(u - &values[target.index()]),
        Bound::Infinite => None,
    };
    let head = net.graph().head(target);
    let tail = net.graph().tail(target);
    let pushed = augment_to_max(
        net,
        &mut values,
        head,
        tail,
        &order,
        Some(target),
        headroom.as_ref(),
    );
    match pushed {
        Ok(pushed) => {
            values[target.index()] += &pushed;
        }
        Err(FlowError::UnboundedFlow) => return Err(FlowError::UnboundedObjective),
        Err(e) => return Err(e),
    }

    let best = values[target.index()].clone();
    let flow = Flow::from_values(net, values);
    debug_assert!(flow.validate(net).is_ok());
    Ok((best, flow))
}
