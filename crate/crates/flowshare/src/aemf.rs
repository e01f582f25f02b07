//! Equal and almost-equal maximum-flow machinery on the profit-sharing
//! graph.
//!
//! Three related questions about flows of full value `C` (the total profit)
//! are answered here exactly:
//!
//! - the largest common lower bound `lambda` that all non-pinned payment
//!   edges can simultaneously attain ([`max_common_lower_bound`]);
//! - feasibility of prescribed per-set payment windows
//!   ([`check_aemf_feasible`]);
//! - the smallest window width `delta` such that all payments fit into
//!   `[L, L + delta]` for some base `L` ([`min_deviation`]).
//!
//! The searches run a discrete Newton iteration on exact rationals: an
//! infeasible probe yields a violated-cut certificate whose bound is an
//! affine function of the parameter, and the next probe jumps straight to
//! that bound. Every accepted value is exact; no tolerance is involved.
//! Binary-search-with-recovery variants of both searches are provided as
//! independent cross-checks, along with tightness certificates.

use crate::flow::{
    feasible_circulation_with_order, rational_recover, AugmentOrder, Bound, BoundedNetwork,
    EdgeId, Flow, FlowError, InfeasibilityCut, Required,
};
use crate::flow::{common_denominator, factorial_denominator_bound};
use crate::rat::Rat;
use crate::sharing::ProfitSharingGraph;
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AemfError {
    /// The pinned payments admit no full-value flow at all; the caller's
    /// iteration state is inconsistent.
    #[error("pinned payments admit no full-value flow: {0}")]
    InfeasiblePinned(InfeasibilityCut),

    /// Window constraints conflict on a single edge (tightened lower bound
    /// exceeds the tightened upper bound).
    #[error("window constraints conflict on edge {0}")]
    WindowConflict(EdgeId),

    /// No flow meets the requested windows and value.
    #[error("window-constrained flow infeasible: {0}")]
    Infeasible(InfeasibilityCut),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// An edge set whose flow values must lie within a common window of width
/// `deviation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologousSet {
    pub edges: BTreeSet<EdgeId>,
    pub deviation: Bound,
}

/// Partition of the payment edges into pinned (frozen at a value) and free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinnedState {
    pinned: BTreeMap<EdgeId, Rat>,
    free: BTreeSet<EdgeId>,
}

impl PinnedState {
    /// Every payment edge free, nothing pinned.
    pub fn all_free(psg: &ProfitSharingGraph) -> Self {
        PinnedState {
            pinned: BTreeMap::new(),
            free: psg.payment_edges().iter().copied().collect(),
        }
    }

    /// Freezes a free edge at `value`.
    pub fn pin(&mut self, edge: EdgeId, value: Rat) {
        assert!(self.free.remove(&edge), "edge {edge} is not free");
        self.pinned.insert(edge, value);
    }

    pub fn free(&self) -> &BTreeSet<EdgeId> {
        &self.free
    }

    pub fn pinned(&self) -> &BTreeMap<EdgeId, Rat> {
        &self.pinned
    }

    pub fn pinned_total(&self) -> Rat {
        self.pinned.values().sum()
    }

    pub fn is_complete(&self) -> bool {
        self.free.is_empty()
    }
}

/// Network bounds for the common-lower-bound problem: pinned payment edges
/// frozen, free payment edges at least `lambda`, everything else unchanged.
fn lambda_bounds(
    psg: &ProfitSharingGraph,
    state: &PinnedState,
    lambda: &Rat,
) -> Result<BoundedNetwork, FlowError> {
    let net = psg.network();
    let mut lower = net.lowers().to_vec();
    let mut upper = net.uppers().to_vec();
    for (&e, v) in state.pinned() {
        lower[e.index()] = v.clone();
        upper[e.index()] = Bound::Finite(v.clone());
    }
    for &e in state.free() {
        lower[e.index()] = lambda.clone();
    }
    net.with_bounds(lower, upper)
}

/// Affine terms of a violated cut in the common-lower-bound system:
/// `lower_const + free_entering * lambda > upper_out`.
fn lambda_cut_terms(
    psg: &ProfitSharingGraph,
    state: &PinnedState,
    cut: &InfeasibilityCut,
) -> (usize, Rat, Rat) {
    let net = psg.network();
    let g = net.graph();
    let mut free_entering = 0usize;
    let mut lower_const = Rat::zero();
    let mut upper_out = Rat::zero();
    for e in g.edge_ids() {
        let tail_in = cut.contains(g.tail(e));
        let head_in = cut.contains(g.head(e));
        if head_in && !tail_in {
            if state.free().contains(&e) {
                free_entering += 1;
            } else if let Some(v) = state.pinned().get(&e) {
                lower_const += v;
            }
            // other edges have lower bound zero
        } else if tail_in && !head_in {
            if let Some(v) = state.pinned().get(&e) {
                upper_out += v;
            } else {
                match net.upper(e) {
                    Bound::Finite(u) => upper_out += u,
                    Bound::Infinite => {
                        unreachable!("violated cut crossed by an uncapacitated edge")
                    }
                }
            }
        }
    }
    // Implicit full-value return edge sink -> source.
    if cut.contains(net.source()) && !cut.contains(net.sink()) {
        lower_const += psg.total_profit();
    } else if cut.contains(net.sink()) && !cut.contains(net.source()) {
        upper_out += psg.total_profit();
    }
    (free_entering, lower_const, upper_out)
}

/// Maximum `lambda` such that a flow of full value exists with every free
/// payment edge at least `lambda` and every pinned edge at its value.
/// Returns the exact threshold and a witness flow attaining it.
pub fn max_common_lower_bound(
    psg: &ProfitSharingGraph,
    state: &PinnedState,
) -> Result<(Rat, Flow), AemfError> {
    max_common_lower_bound_with_order(psg, state, &AugmentOrder::lexicographic())
}

/// [`max_common_lower_bound`] with an explicit arc-scanning order for the
/// feasibility solves. The threshold is order-independent; the witness flow
/// is not.
pub fn max_common_lower_bound_with_order(
    psg: &ProfitSharingGraph,
    state: &PinnedState,
    order: &AugmentOrder,
) -> Result<(Rat, Flow), AemfError> {
    let free_count = state.free().len();
    if free_count == 0 {
        return Err(AemfError::InvalidInput("no free payment edges".into()));
    }
    // The mean of the undistributed profit is an upper bound on lambda and
    // the fixed point when every free edge can reach it.
    let mut lambda =
        (psg.total_profit() - state.pinned_total()) / Rat::from_int(free_count as i64);
    if lambda.is_negative() {
        lambda = Rat::zero();
    }
    loop {
        let net = lambda_bounds(psg, state, &lambda)?;
        match feasible_circulation_with_order(
            &net,
            Required::Exact(psg.total_profit().clone()),
            order,
        ) {
            Ok(flow) => return Ok((lambda, flow)),
            Err(FlowError::Infeasible(cut)) => {
                let (p, lower_const, upper_out) = lambda_cut_terms(psg, state, &cut);
                if p == 0 {
                    return Err(AemfError::InfeasiblePinned(cut));
                }
                let next = (&upper_out - &lower_const) / Rat::from_int(p as i64);
                if next.is_negative() {
                    return Err(AemfError::InfeasiblePinned(cut));
                }
                debug_assert!(next < lambda, "Newton step must strictly decrease");
                lambda = next;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Feasibility of the common lower bound `lambda` (diagnostic; used by the
/// threshold certificates in tests).
pub fn common_lower_bound_feasible(
    psg: &ProfitSharingGraph,
    state: &PinnedState,
    lambda: &Rat,
) -> Result<bool, AemfError> {
    let net = lambda_bounds(psg, state, lambda)?;
    match feasible_circulation_with_order(
        &net,
        Required::Exact(psg.total_profit().clone()),
        &AugmentOrder::lexicographic(),
    ) {
        Ok(_) => Ok(true),
        Err(FlowError::Infeasible(_)) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// Safe denominator bound for thresholds of this sharing graph:
/// `D * (m + 3)!` where `D` is the common denominator of all capacities and
/// `m + 1` counts the edges including the return edge.
pub fn lambda_denominator_bound(psg: &ProfitSharingGraph) -> BigInt {
    let d = common_denominator(psg.network(), [psg.total_profit()]);
    factorial_denominator_bound(&d, psg.network().edge_count() + 1)
}

/// Binary-search route for the common lower bound: bisect to width below
/// `1 / den_bound^2`, recover the exact rational, then certify the
/// threshold (feasible at the value, infeasible just above). Slower than
/// the Newton route and independent of it; they must agree.
pub fn max_common_lower_bound_bisect(
    psg: &ProfitSharingGraph,
    state: &PinnedState,
    den_bound: &BigInt,
) -> Result<Rat, AemfError> {
    let free_count = state.free().len();
    if free_count == 0 {
        return Err(AemfError::InvalidInput("no free payment edges".into()));
    }
    let mut lo = Rat::zero();
    if !common_lower_bound_feasible(psg, state, &lo)? {
        let net = lambda_bounds(psg, state, &lo)?;
        match feasible_circulation_with_order(
            &net,
            Required::Exact(psg.total_profit().clone()),
            &AugmentOrder::lexicographic(),
        ) {
            Err(FlowError::Infeasible(cut)) => return Err(AemfError::InfeasiblePinned(cut)),
            _ => unreachable!("probe at zero just failed"),
        }
    }
    let mut hi = (psg.total_profit() - state.pinned_total())
        / Rat::from_int(free_count as i64)
        + Rat::one();
    let width = Rat::from_big(BigInt::from(1), den_bound * den_bound);
    let half = Rat::new(1, 2);
    while &hi - &lo >= width {
        let mid = (&lo + &hi) * &half;
        if common_lower_bound_feasible(psg, state, &mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = rational_recover(&lo, &hi, den_bound)?;
    let eps = &width * &half;
    let certified = common_lower_bound_feasible(psg, state, &lambda)?
        && !common_lower_bound_feasible(psg, state, &(&lambda + &eps))?;
    if !certified {
        return Err(AemfError::InvalidInput(format!(
            "recovered threshold {lambda} failed its certificate; denominator bound too small"
        )));
    }
    Ok(lambda)
}

/// Feasibility of a flow of exactly `required_value` with every edge of
/// each homologous set held inside its window `[anchor_i, anchor_i +
/// deviation_i]`. Overlapping sets intersect their windows.
pub fn check_aemf_feasible(
    net: &BoundedNetwork,
    sets: &[HomologousSet],
    anchors: &[Rat],
    required_value: Rat,
) -> Result<Flow, AemfError> {
    if sets.len() != anchors.len() {
        return Err(AemfError::InvalidInput(format!(
            "{} homologous sets but {} anchors",
            sets.len(),
            anchors.len()
        )));
    }
    let mut lower = net.lowers().to_vec();
    let mut upper = net.uppers().to_vec();
    for (set, anchor) in sets.iter().zip(anchors) {
        let window_top = match &set.deviation {
            Bound::Finite(d) => {
                if d.is_negative() {
                    return Err(AemfError::InvalidInput(format!(
                        "negative deviation {d}"
                    )));
                }
                Bound::Finite(anchor + d)
            }
            Bound::Infinite => Bound::Infinite,
        };
        for &e in &set.edges {
            if e.index() >= net.edge_count() {
                return Err(AemfError::InvalidInput(format!("edge {e} out of range")));
            }
            if &lower[e.index()] < anchor {
                lower[e.index()] = anchor.clone();
            }
            upper[e.index()] = std::mem::replace(&mut upper[e.index()], Bound::Infinite)
                .min_with(window_top.clone());
        }
    }
    for e in net.graph().edge_ids() {
        if upper[e.index()].lt_rat(&lower[e.index()]) {
            return Err(AemfError::WindowConflict(e));
        }
    }
    let tightened = net.with_bounds(lower, upper)?;
    match feasible_circulation_with_order(
        &tightened,
        Required::Exact(required_value),
        &AugmentOrder::lexicographic(),
    ) {
        Ok(flow) => Ok(flow),
        Err(FlowError::Infeasible(cut)) => Err(AemfError::Infeasible(cut)),
        Err(e) => Err(e.into()),
    }
}

/// The profit-sharing network extended with an explicit return edge
/// sink -> source, which carries the flow value and lets the window
/// searches cap it.
struct WindowSystem<'a> {
    psg: &'a ProfitSharingGraph,
    graph_net_template: BoundedNetwork,
    return_edge: EdgeId,
}

impl<'a> WindowSystem<'a> {
    fn new(psg: &'a ProfitSharingGraph) -> Result<Self, FlowError> {
        let net = psg.network();
        let mut graph = net.graph().clone();
        let return_edge = graph.add_edge(net.sink(), net.source())?;
        let mut upper = net.uppers().to_vec();
        upper.push(Bound::Finite(psg.total_profit().clone()));
        let mut lower = net.lowers().to_vec();
        lower.push(Rat::zero());
        let template =
            BoundedNetwork::new(graph, lower, upper, net.source(), net.sink())?;
        Ok(WindowSystem {
            psg,
            graph_net_template: template,
            return_edge,
        })
    }

    /// Bounds: windowed payment edges in `[base, base + delta]`, the return
    /// edge in `[value_lo, total]`, everything else unchanged.
    fn bounds(
        &self,
        windowed: &BTreeSet<EdgeId>,
        base: &Rat,
        delta: &Rat,
        pin_full_value: bool,
    ) -> Result<BoundedNetwork, FlowError> {
        let mut lower = self.graph_net_template.lowers().to_vec();
        let mut upper = self.graph_net_template.uppers().to_vec();
        let top = base + delta;
        for &e in windowed {
            lower[e.index()] = base.clone();
            upper[e.index()] = Bound::Finite(top.clone());
        }
        if pin_full_value {
            lower[self.return_edge.index()] = self.psg.total_profit().clone();
        }
        self.graph_net_template.with_bounds(lower, upper)
    }

    /// Circulation feasibility of the given bounds (conservation
    /// everywhere; the value rides on the return edge).
    fn solve(
        &self,
        net: &BoundedNetwork,
        order: &AugmentOrder,
    ) -> Result<Flow, FlowError> {
        feasible_circulation_with_order(net, Required::Exact(Rat::zero()), order)
    }

    /// Affine terms of a violated cut: `lower_const + entering * L >
    /// upper_const + leaving * (L + delta)`.
    fn cut_terms(
        &self,
        windowed: &BTreeSet<EdgeId>,
        pin_full_value: bool,
        cut: &InfeasibilityCut,
    ) -> WindowCutTerms {
        let net = &self.graph_net_template;
        let g = net.graph();
        let mut terms = WindowCutTerms {
            entering: 0,
            leaving: 0,
            lower_const: Rat::zero(),
            upper_const: Rat::zero(),
        };
        for e in g.edge_ids() {
            let tail_in = cut.contains(g.tail(e));
            let head_in = cut.contains(g.head(e));
            if head_in && !tail_in {
                if windowed.contains(&e) {
                    terms.entering += 1;
                } else if e == self.return_edge && pin_full_value {
                    terms.lower_const += self.psg.total_profit();
                }
                // other lower bounds are zero
            } else if tail_in && !head_in {
                if windowed.contains(&e) {
                    terms.leaving += 1;
                } else {
                    match net.upper(e) {
                        Bound::Finite(u) => terms.upper_const += u,
                        Bound::Infinite => {
                            unreachable!("violated cut crossed by an uncapacitated edge")
                        }
                    }
                }
            }
        }
        terms
    }
}

struct WindowCutTerms {
    entering: usize,
    leaving: usize,
    lower_const: Rat,
    upper_const: Rat,
}

/// Binding constraint of the base search: `L(delta) = (offset + slope *
/// delta) / divisor`.
struct BindingCut {
    offset: Rat,
    slope: Rat,
    divisor: Rat,
}

impl BindingCut {
    fn base_at(&self, delta: &Rat) -> Rat {
        (&self.offset + &(&self.slope * delta)) / &self.divisor
    }
}

/// Maximum base `L` such that a circulation exists with windowed payments
/// in `[L, L + delta]` and value at most the total profit. Returns the
/// base and the binding cut as an affine function of `delta`.
fn max_window_base(
    system: &WindowSystem,
    windowed: &BTreeSet<EdgeId>,
    delta: &Rat,
    order: &AugmentOrder,
) -> Result<(Rat, BindingCut), AemfError> {
    // Payments never exceed the flow value, which the return edge caps at
    // the total profit; start from that bound.
    let mut base = system.psg.total_profit().clone();
    let mut binding = BindingCut {
        offset: system.psg.total_profit().clone(),
        slope: Rat::zero(),
        divisor: Rat::one(),
    };
    loop {
        let net = system.bounds(windowed, &base, delta, false)?;
        match system.solve(&net, order) {
            Ok(_) => return Ok((base, binding)),
            Err(FlowError::Infeasible(cut)) => {
                let t = system.cut_terms(windowed, false, &cut);
                let p = t.entering as i64;
                let q = t.leaving as i64;
                debug_assert!(p > q, "violated window cut must be lower-driven");
                if p <= q {
                    return Err(AemfError::Infeasible(cut));
                }
                binding = BindingCut {
                    offset: &t.upper_const - &t.lower_const,
                    slope: Rat::from_int(q),
                    divisor: Rat::from_int(p - q),
                };
                let next = binding.base_at(delta);
                debug_assert!(next < base);
                base = next;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Feasibility of window width `delta`: is there a base `L` with a
/// full-value flow whose windowed payments all lie in `[L, L + delta]`?
/// Returns a witness when feasible.
///
/// Larger bases only help the full-value check (every cut bounding the
/// value from below gains headroom), so it suffices to probe the single
/// base returned by [`max_window_base`].
pub fn deviation_feasible(
    psg: &ProfitSharingGraph,
    windowed: &BTreeSet<EdgeId>,
    delta: &Rat,
) -> Result<Option<Flow>, AemfError> {
    let order = AugmentOrder::lexicographic();
    let system = WindowSystem::new(psg)?;
    let (base, _) = max_window_base(&system, windowed, delta, &order)?;
    let net = system.bounds(windowed, &base, delta, true)?;
    match system.solve(&net, &order) {
        Ok(flow) => Ok(Some(strip_return_edge(psg, flow))),
        Err(FlowError::Infeasible(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn strip_return_edge(psg: &ProfitSharingGraph, flow: Flow) -> Flow {
    let mut values = flow.into_values();
    values.truncate(psg.network().edge_count());
    Flow::from_values(psg.network(), values)
}

/// Smallest window width `delta` admitting a full-value flow with all
/// `windowed` payments inside `[L, L + delta]` for some base `L`, together
/// with a witness flow. Exact; `windowed` must be a nonempty subset of the
/// payment edges.
pub fn min_deviation(
    psg: &ProfitSharingGraph,
    windowed: &BTreeSet<EdgeId>,
) -> Result<(Rat, Flow), AemfError> {
    min_deviation_with_order(psg, windowed, &AugmentOrder::lexicographic())
}

/// [`min_deviation`] with an explicit arc-scanning order.
pub fn min_deviation_with_order(
    psg: &ProfitSharingGraph,
    windowed: &BTreeSet<EdgeId>,
    order: &AugmentOrder,
) -> Result<(Rat, Flow), AemfError> {
    if windowed.is_empty() {
        return Err(AemfError::InvalidInput("empty homologous set".into()));
    }
    let payment_edges: BTreeSet<EdgeId> = psg.payment_edges().iter().copied().collect();
    if !windowed.is_subset(&payment_edges) {
        return Err(AemfError::InvalidInput(
            "windowed edges must be payment edges".into(),
        ));
    }
    let system = WindowSystem::new(psg)?;
    let mut delta = Rat::zero();
    loop {
        let (base, binding) = max_window_base(&system, windowed, &delta, order)?;
        let net = system.bounds(windowed, &base, &delta, true)?;
        match system.solve(&net, order) {
            Ok(flow) => return Ok((delta, strip_return_edge(psg, flow))),
            Err(FlowError::Infeasible(cut)) => {
                let t = system.cut_terms(windowed, true, &cut);
                // At the maximal base, full value can only fail for lack of
                // window headroom: the cut is driven by its window uppers.
                debug_assert_eq!(t.entering, 0, "unexpected lower-driven cut at max base");
                let q = Rat::from_int(t.leaving as i64);
                if t.leaving == 0 {
                    return Err(AemfError::Infeasible(cut));
                }
                // Solve lower_const = upper_const + q * (L(delta') + delta')
                // with L(delta') = (offset + slope * delta') / divisor.
                let gap = &t.lower_const - &t.upper_const;
                let numer = &(&gap * &binding.divisor) - &(&q * &binding.offset);
                let denom = &q * &(&binding.slope + &binding.divisor);
                let next = numer / denom;
                debug_assert!(next > delta, "deviation Newton step must increase");
                delta = next;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Binary-search route for the minimum deviation, with recovery and a
/// tightness certificate. Independent of the Newton jumps in
/// [`min_deviation`]; they must agree.
pub fn min_deviation_bisect(
    psg: &ProfitSharingGraph,
    windowed: &BTreeSet<EdgeId>,
    den_bound: &BigInt,
) -> Result<Rat, AemfError> {
    if deviation_feasible(psg, windowed, &Rat::zero())?.is_some() {
        return Ok(Rat::zero());
    }
    // Any full-value flow's payment spread is feasible; use the
    // deterministic maximum flow.
    let max_flow = crate::flow::max_flow(psg.network())?;
    let payments: Vec<Rat> = windowed
        .iter()
        .map(|&e| max_flow.edge_value(e).clone())
        .collect();
    let mut hi = payments.iter().max().expect("nonempty").clone()
        - payments.iter().min().expect("nonempty").clone();
    let mut lo = Rat::zero();
    debug_assert!(deviation_feasible(psg, windowed, &hi)?.is_some());
    let width = Rat::from_big(BigInt::from(1), den_bound * den_bound);
    let half = Rat::new(1, 2);
    while &hi - &lo >= width {
        let mid = (&lo + &hi) * &half;
        if deviation_feasible(psg, windowed, &mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let delta = rational_recover(&lo, &hi, den_bound)?;
    let eps = &width * &half;
    let tight = deviation_feasible(psg, windowed, &delta)?.is_some()
        && (delta.is_zero() || deviation_feasible(psg, windowed, &(&delta - &eps))?.is_none());
    if !tight {
        return Err(AemfError::InvalidInput(format!(
            "recovered deviation {delta} failed its certificate; denominator bound too small"
        )));
    }
    Ok(delta)
}
