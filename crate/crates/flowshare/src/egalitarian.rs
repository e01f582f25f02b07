//! The egalitarian allocation and its brute-force oracle.
//!
//! The allocation is computed on the profit-sharing graph by an iterative
//! fixing loop: raise the common lower bound of all non-fixed payments to
//! its maximum, freeze the payments that cannot exceed it in any full-value
//! flow, and repeat on the rest. Each round fixes at least one payment, so
//! there are at most as many rounds as players.
//!
//! The oracle recomputes the allocation from the coalition game alone by
//! repeatedly paying out a largest coalition of maximum average worth.
//! Both routes must agree exactly; the acceptance suite enforces it across
//! fixtures and seeded random instances.

use crate::aemf::{max_common_lower_bound_with_order, AemfError, PinnedState};
use crate::exchange::{solve_exchange, CoalitionGame, ExchangeError, ExchangeInstance, PlayerId};
use crate::flow::{residual_reachable, AugmentOrder, EdgeId};
use crate::par::{self, ExecMode};
use crate::rat::Rat;
use crate::sharing::{build_profit_sharing_graph, extract_payments, PaymentVector, SharingError};
use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EgalError {
    /// Two distinct maximum-cardinality average-maximizing coalitions; the
    /// reduction step is ill-defined for this (non-convex) game.
    #[error("ambiguous maximizer: coalitions {0:?} and {1:?} both maximize the average")]
    AmbiguousMaximizer(Vec<PlayerId>, Vec<PlayerId>),

    #[error("oracle enumeration limited to {limit} players, got {players}")]
    TooManyPlayers { players: usize, limit: usize },

    #[error("payment vectors cover different player sets")]
    DimensionMismatch,

    /// The fixing loop made no progress; an internal invariant failed.
    #[error("fixing loop stalled at lambda {0}")]
    Stalled(Rat),

    #[error(transparent)]
    Aemf(#[from] AemfError),

    #[error(transparent)]
    Sharing(#[from] SharingError),

    #[error(transparent)]
    Exchange(#[from] ExchangeError),
}

/// One round of the fixing loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub index: usize,
    /// The maximal common lower bound of this round.
    pub lambda: Rat,
    /// Players whose payments were frozen at `lambda` this round.
    pub newly_fixed: Vec<PlayerId>,
    /// Payments of the witness flow that attained `lambda`.
    pub witness: PaymentVector,
}

/// The egalitarian allocation with its per-round trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EAResult {
    pub payments: PaymentVector,
    pub trace: Vec<IterationRecord>,
}

/// Options for [`egalitarian_allocation_with`].
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Arc-scanning order for the flow solves. The allocation is invariant
    /// under this; it only shuffles which witness flows the loop sees.
    pub order: AugmentOrder,
    /// Execution mode for the per-edge fixedness scans.
    pub exec: ExecMode,
}

impl SolveOptions {
    pub fn seeded(seed: u64, edge_count: usize) -> Self {
        SolveOptions {
            order: AugmentOrder::seeded(seed, edge_count),
            exec: ExecMode::default(),
        }
    }
}

/// Computes the egalitarian allocation of a solved exchange.
pub fn egalitarian_allocation(inst: &ExchangeInstance) -> Result<EAResult, EgalError> {
    egalitarian_allocation_with(inst, &SolveOptions::default())
}

/// [`egalitarian_allocation`] with explicit solver options.
pub fn egalitarian_allocation_with(
    inst: &ExchangeInstance,
    opts: &SolveOptions,
) -> Result<EAResult, EgalError> {
    let sol = solve_exchange(inst)?;
    if !sol.total_profit.is_positive() {
        // Nothing to share; the allocation is identically zero.
        return Ok(EAResult {
            payments: PaymentVector::from_pairs(
                sol.players.iter().map(|p| (p.clone(), Rat::zero())),
            ),
            trace: Vec::new(),
        });
    }
    let psg = build_profit_sharing_graph(&sol)?;
    egalitarian_on_psg(&psg, opts)
}

/// The fixing loop itself, on an already-built sharing graph.
pub fn egalitarian_on_psg(
    psg: &crate::sharing::ProfitSharingGraph,
    opts: &SolveOptions,
) -> Result<EAResult, EgalError> {
    let mut state = PinnedState::all_free(psg);
    let mut trace: Vec<IterationRecord> = Vec::new();

    while !state.is_complete() {
        let (lambda, witness) = max_common_lower_bound_with_order(psg, &state, &opts.order)?;
        if let Some(prev) = trace.last() {
            debug_assert!(lambda > prev.lambda, "common bound must strictly increase");
        }

        // A free edge at lambda is fixed when the sink cannot reach its
        // contract node in the residual graph: any further payment would
        // have to pull another free payment below lambda.
        let net = bounds_at(psg, &state, &lambda)?;
        let candidates: Vec<EdgeId> = state
            .free()
            .iter()
            .copied()
            .filter(|&e| witness.edge_value(e) == &lambda)
            .collect();
        let flags = par::run_map(opts.exec, candidates.clone(), |e| {
            let tail = psg.network().graph().tail(e);
            !residual_reachable(&witness, &net, psg.network().sink(), tail)
        });
        let fixed: Vec<EdgeId> = candidates
            .into_iter()
            .zip(flags)
            .filter_map(|(e, is_fixed)| is_fixed.then_some(e))
            .collect();
        if fixed.is_empty() {
            return Err(EgalError::Stalled(lambda));
        }

        let mut newly_fixed = Vec::with_capacity(fixed.len());
        for e in fixed {
            let player = psg
                .payment_edges()
                .iter()
                .position(|&pe| pe == e)
                .expect("payment edge");
            newly_fixed.push(psg.players()[player].clone());
            state.pin(e, lambda.clone());
        }
        trace.push(IterationRecord {
            index: trace.len() + 1,
            lambda,
            newly_fixed,
            witness: extract_payments(psg, &witness),
        });
    }

    let payments = PaymentVector::from_pairs(psg.players().iter().enumerate().map(|(i, p)| {
        (
            p.clone(),
            state.pinned()[&psg.payment_edge(i)].clone(),
        )
    }));
    debug_assert_eq!(&payments.total(), psg.total_profit());
    Ok(EAResult { payments, trace })
}

/// Bounds of the fixedness test: pinned edges frozen, free edges at least
/// `lambda`.
fn bounds_at(
    psg: &crate::sharing::ProfitSharingGraph,
    state: &PinnedState,
    lambda: &Rat,
) -> Result<crate::flow::BoundedNetwork, EgalError> {
    let net = psg.network();
    let mut lower = net.lowers().to_vec();
    let mut upper = net.uppers().to_vec();
    for (&e, v) in state.pinned() {
        lower[e.index()] = v.clone();
        upper[e.index()] = crate::flow::Bound::Finite(v.clone());
    }
    for &e in state.free() {
        lower[e.index()] = lambda.clone();
    }
    Ok(net.with_bounds(lower, upper).map_err(AemfError::from)?)
}

/// Replays the fixing loop and verifies, round by round, that the residual
/// reachability test agrees with the definitional check: an edge at the
/// bound is fixed exactly when re-maximizing its flow over all full-value
/// flows cannot move it higher.
pub fn fixedness_cross_check(inst: &ExchangeInstance) -> Result<(), EgalError> {
    let sol = solve_exchange(inst)?;
    if !sol.total_profit.is_positive() {
        return Ok(());
    }
    let psg = build_profit_sharing_graph(&sol)?;
    let opts = SolveOptions::default();
    let mut state = PinnedState::all_free(&psg);
    while !state.is_complete() {
        let (lambda, witness) = max_common_lower_bound_with_order(&psg, &state, &opts.order)?;
        let net = bounds_at(&psg, &state, &lambda)?;
        let mut fixed = Vec::new();
        for &e in state.free() {
            if witness.edge_value(e) != &lambda {
                continue;
            }
            let tail = psg.network().graph().tail(e);
            let by_reachability =
                !residual_reachable(&witness, &net, psg.network().sink(), tail);
            let best = crate::flow::max_edge_objective(&net, e, psg.total_profit().clone())
                .map_err(AemfError::from)?;
            let by_objective = best == lambda;
            if by_reachability != by_objective {
                return Err(EgalError::Stalled(lambda));
            }
            if by_reachability {
                fixed.push(e);
            }
        }
        if fixed.is_empty() {
            return Err(EgalError::Stalled(lambda));
        }
        for e in fixed {
            state.pin(e, lambda.clone());
        }
    }
    Ok(())
}

/// Largest player count the oracle will enumerate.
pub const MAX_ORACLE_PLAYERS: usize = 16;

/// Brute-force oracle: repeatedly pay out the maximum-cardinality coalition
/// maximizing the average reduced value, reduce the game, and recurse on
/// the remaining players.
pub fn dutta_ray(game: &CoalitionGame) -> Result<PaymentVector, EgalError> {
    let n = game.player_count();
    if n > MAX_ORACLE_PLAYERS {
        return Err(EgalError::TooManyPlayers {
            players: n,
            limit: MAX_ORACLE_PLAYERS,
        });
    }
    let mut payments: Vec<Option<Rat>> = vec![None; n];
    let mut fixed_mask: u64 = 0;
    let mut remaining: u64 = game.full_mask();

    while remaining != 0 {
        let fixed_value = game.value_mask(fixed_mask);
        let mut best: Option<(Rat, u64)> = None;
        let mut ambiguous: Option<u64> = None;
        // Enumerate nonempty subsets of the remaining players.
        let mut sub = remaining;
        loop {
            let avg = (game.value_mask(sub | fixed_mask) - &fixed_value)
                / Rat::from_int(sub.count_ones() as i64);
            match &best {
                Some((best_avg, best_set)) => match avg.cmp(best_avg) {
                    Ordering::Greater => {
                        best = Some((avg, sub));
                        ambiguous = None;
                    }
                    Ordering::Equal => {
                        let cur = best_set.count_ones();
                        match sub.count_ones().cmp(&cur) {
                            Ordering::Greater => {
                                best = Some((avg, sub));
                                ambiguous = None;
                            }
                            Ordering::Equal => ambiguous = Some(sub),
                            Ordering::Less => {}
                        }
                    }
                    Ordering::Less => {}
                },
                None => best = Some((avg, sub)),
            }
            sub = (sub - 1) & remaining;
            if sub == 0 {
                break;
            }
        }
        let (avg, chosen) = best.expect("remaining nonempty");
        if let Some(other) = ambiguous {
            return Err(EgalError::AmbiguousMaximizer(
                game.mask_players(chosen),
                game.mask_players(other),
            ));
        }
        for i in 0..n {
            if chosen & (1u64 << i) != 0 {
                payments[i] = Some(avg.clone());
            }
        }
        fixed_mask |= chosen;
        remaining &= !chosen;
    }

    Ok(PaymentVector::from_pairs(
        game.players()
            .iter()
            .zip(payments)
            .map(|(p, r)| (p.clone(), r.expect("all players paid"))),
    ))
}

/// Outcome of a leximin comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeximinOrder {
    Less,
    Equal,
    Greater,
}

/// Compares two payment vectors over the same players by their ascending
/// value profiles, lexicographically.
pub fn leximin_compare(a: &PaymentVector, b: &PaymentVector) -> Result<LeximinOrder, EgalError> {
    let pa: BTreeSet<&PlayerId> = a.players().collect();
    let pb: BTreeSet<&PlayerId> = b.players().collect();
    if pa != pb {
        return Err(EgalError::DimensionMismatch);
    }
    Ok(match a.sorted_values().cmp(&b.sorted_values()) {
        Ordering::Less => LeximinOrder::Less,
        Ordering::Equal => LeximinOrder::Equal,
        Ordering::Greater => LeximinOrder::Greater,
    })
}

/// Difference between the largest and smallest payment (zero for fewer
/// than two entries).
pub fn spread(p: &PaymentVector) -> Rat {
    let sorted = p.sorted_values();
    match (sorted.first(), sorted.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => Rat::zero(),
    }
}
