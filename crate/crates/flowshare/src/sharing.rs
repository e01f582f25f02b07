//! The profit-sharing graph and core checks.
//!
//! Each positive-profit trade contributes a profit node fed from a fresh
//! source with capacity equal to the trade's generated profit; the profit
//! node forwards to the trade's two contract nodes, and every contract
//! node drains into a fresh sink through an uncapacitated payment edge.
//! A player's payment under a flow is the flow on their payment edge, so
//! any maximum flow (value = total profit) splits the whole profit among
//! the players, and any such split satisfies individual and coalitional
//! rationality.

use crate::exchange::{CoalitionGame, ExchangeError, PlayerId, TradeSolution};
use crate::flow::{Bound, BoundedNetwork, DirectedGraph, EdgeId, Flow, NodeId};
use crate::par::{self, ExecMode};
use crate::rat::Rat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SharingError {
    #[error("no trade with positive profit; the sharing graph would be empty")]
    EmptySolution,

    #[error("payment vector covers {payments} players, game has {game}")]
    DimensionMismatch { payments: usize, game: usize },

    #[error("exhaustive core check limited to {limit} players, got {players}")]
    ExhaustiveTooLarge { players: usize, limit: usize },

    #[error(transparent)]
    Exchange(#[from] ExchangeError),

    #[error(transparent)]
    Flow(#[from] crate::flow::FlowError),
}

/// The transformed network on which payments are flows.
#[derive(Debug, Clone)]
pub struct ProfitSharingGraph {
    network: BoundedNetwork,
    players: Vec<PlayerId>,
    /// Node of trade `k` (positive-profit trades only, in trade order).
    profit_nodes: Vec<NodeId>,
    /// Edge source -> profit node of trade `k`.
    source_edges: Vec<EdgeId>,
    /// Profit of trade `k`, i.e. the capacity of its source edge.
    trade_profits: Vec<Rat>,
    /// (seller index, buyer index) of trade `k`.
    trade_pairs: Vec<(usize, usize)>,
    /// Contract node per player, in player order.
    contract_nodes: Vec<NodeId>,
    /// Payment edge (contract -> sink) per player, in player order.
    payment_edges: Vec<EdgeId>,
    /// Total profit; equals the maximum flow value.
    total_profit: Rat,
}

impl ProfitSharingGraph {
    pub fn network(&self) -> &BoundedNetwork {
        &self.network
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn profit_nodes(&self) -> &[NodeId] {
        &self.profit_nodes
    }

    pub fn source_edges(&self) -> &[EdgeId] {
        &self.source_edges
    }

    pub fn trade_profits(&self) -> &[Rat] {
        &self.trade_profits
    }

    pub fn trade_pairs(&self) -> &[(usize, usize)] {
        &self.trade_pairs
    }

    pub fn contract_nodes(&self) -> &[NodeId] {
        &self.contract_nodes
    }

    pub fn payment_edges(&self) -> &[EdgeId] {
        &self.payment_edges
    }

    pub fn payment_edge(&self, player: usize) -> EdgeId {
        self.payment_edges[player]
    }

    pub fn total_profit(&self) -> &Rat {
        &self.total_profit
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }
}

/// Builds the profit-sharing graph of a solved exchange.
///
/// Construction, with deterministic numbering: node 0 is the source, node 1
/// the sink; one profit node per positive-profit trade in trade order; one
/// contract node per player in player order. Edges: source edges per trade,
/// then the two trade-to-contract edges per trade (seller before buyer),
/// then one uncapacitated payment edge per player. Zero-profit trades
/// contribute nothing and are skipped.
pub fn build_profit_sharing_graph(
    sol: &TradeSolution,
) -> Result<ProfitSharingGraph, SharingError> {
    let kept: Vec<usize> = (0..sol.trades.len())
        .filter(|&k| sol.trades[k].profit.is_positive())
        .collect();
    if kept.is_empty() {
        return Err(SharingError::EmptySolution);
    }

    let mut graph = DirectedGraph::new();
    let source = graph.add_node("sigma");
    let sink = graph.add_node("tau");
    let profit_nodes: Vec<NodeId> = kept
        .iter()
        .enumerate()
        .map(|(i, _)| graph.add_node(format!("trade{i}")))
        .collect();
    let contract_nodes: Vec<NodeId> = sol
        .players
        .iter()
        .map(|p| graph.add_node(p.0.clone()))
        .collect();

    let player_index: BTreeMap<&PlayerId, usize> = sol
        .players
        .iter()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();

    let mut upper: Vec<Bound> = Vec::new();
    let mut source_edges = Vec::with_capacity(kept.len());
    let mut trade_profits = Vec::with_capacity(kept.len());
    let mut trade_pairs = Vec::with_capacity(kept.len());
    for (i, &k) in kept.iter().enumerate() {
        let trade = &sol.trades[k];
        let e = graph
            .add_edge(source, profit_nodes[i])
            .expect("fresh nodes");
        upper.push(Bound::Finite(trade.profit.clone()));
        source_edges.push(e);
        trade_profits.push(trade.profit.clone());
        trade_pairs.push((player_index[&trade.seller], player_index[&trade.buyer]));
    }
    for (i, &k) in kept.iter().enumerate() {
        let trade = &sol.trades[k];
        let (s, b) = trade_pairs[i];
        graph
            .add_edge(profit_nodes[i], contract_nodes[s])
            .expect("fresh nodes");
        upper.push(Bound::Finite(trade.profit.clone()));
        graph
            .add_edge(profit_nodes[i], contract_nodes[b])
            .expect("fresh nodes");
        upper.push(Bound::Finite(trade.profit.clone()));
    }
    let mut payment_edges = Vec::with_capacity(sol.players.len());
    for &c in &contract_nodes {
        let e = graph.add_edge(c, sink).expect("fresh nodes");
        upper.push(Bound::Infinite);
        payment_edges.push(e);
    }

    let network = BoundedNetwork::with_upper_bounds(graph, upper, source, sink)?;
    let total_profit: Rat = trade_profits.iter().sum();

    Ok(ProfitSharingGraph {
        network,
        players: sol.players.clone(),
        profit_nodes,
        source_edges,
        trade_profits,
        trade_pairs,
        contract_nodes,
        payment_edges,
        total_profit,
    })
}

/// A payment per player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaymentVector {
    entries: BTreeMap<PlayerId, Rat>,
}

impl PaymentVector {
    pub fn new(entries: BTreeMap<PlayerId, Rat>) -> Self {
        PaymentVector { entries }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (PlayerId, Rat)>) -> Self {
        PaymentVector {
            entries: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, p: &PlayerId) -> Option<&Rat> {
        self.entries.get(p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlayerId, &Rat)> {
        self.entries.iter()
    }

    pub fn players(&self) -> impl Iterator<Item = &PlayerId> {
        self.entries.keys()
    }

    pub fn total(&self) -> Rat {
        self.entries.values().sum()
    }

    /// Values sorted ascending (the view leximin comparison uses).
    pub fn sorted_values(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = self.entries.values().cloned().collect();
        v.sort();
        v
    }

    pub fn scale(&self, k: i64) -> PaymentVector {
        let f = Rat::from_int(k);
        PaymentVector {
            entries: self
                .entries
                .iter()
                .map(|(p, r)| (p.clone(), r * &f))
                .collect(),
        }
    }
}

/// Reads the payment vector off a flow in the sharing graph: each player is
/// paid the flow on their payment edge (equivalently, the inflow at their
/// contract node).
pub fn extract_payments(psg: &ProfitSharingGraph, flow: &Flow) -> PaymentVector {
    PaymentVector {
        entries: psg
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), flow.edge_value(psg.payment_edges[i]).clone()))
            .collect(),
    }
}

/// The extended ingoing edge set of a coalition: every edge whose head is
/// adjacent (in either direction) to a contract node of a coalition member.
/// Diagnostic only; the core checks work on payments.
pub fn extended_in_edges(psg: &ProfitSharingGraph, coalition: &BTreeSet<PlayerId>) -> BTreeSet<EdgeId> {
    let g = psg.network.graph();
    let mut adjacent: BTreeSet<NodeId> = BTreeSet::new();
    for (i, p) in psg.players.iter().enumerate() {
        if coalition.contains(p) {
            adjacent.extend(g.neighborhood(psg.contract_nodes[i]));
        }
    }
    g.edge_ids()
        .filter(|&e| adjacent.contains(&g.head(e)))
        .collect()
}

/// How [`check_core`] explores the coalition lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckMode {
    /// Every one of the `2^n` coalitions.
    Exhaustive,
    /// `count` coalitions drawn from a seeded generator; explicitly not a
    /// proof of coalitional rationality.
    Sampled { seed: u64, count: usize },
}

/// One coalitional-rationality violation: the coalition, its value, and the
/// payment it actually receives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreViolation {
    pub coalition: Vec<PlayerId>,
    pub value: Rat,
    pub payment: Rat,
}

/// Result of checking a payment vector against the game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreReport {
    /// Individual rationality: every payment non-negative.
    pub ir_ok: bool,
    /// Budget balance: total payment at most the grand value.
    pub bb_ok: bool,
    /// Efficiency: total payment equals the grand value.
    pub eff_ok: bool,
    /// Coalitional rationality over the checked coalitions.
    pub cr_ok: bool,
    pub violated_coalitions: Vec<CoreViolation>,
    pub mode: CheckMode,
}

impl CoreReport {
    /// Core membership: individual and coalitional rationality plus
    /// efficiency (meaningful as a certificate only in exhaustive mode).
    pub fn in_core(&self) -> bool {
        self.ir_ok && self.cr_ok && self.eff_ok
    }
}

/// Largest player count for exhaustive coalition checks.
pub const MAX_EXHAUSTIVE_PLAYERS: usize = 20;

/// Evaluates individual rationality, budget balance, efficiency, and
/// coalitional rationality of `payments` against `game`.
pub fn check_core(
    payments: &PaymentVector,
    game: &CoalitionGame,
    mode: CheckMode,
) -> Result<CoreReport, SharingError> {
    check_core_with(payments, game, mode, ExecMode::default())
}

/// [`check_core`] with an explicit execution mode for the coalition scan.
pub fn check_core_with(
    payments: &PaymentVector,
    game: &CoalitionGame,
    mode: CheckMode,
    exec: ExecMode,
) -> Result<CoreReport, SharingError> {
    let n = game.player_count();
    if payments.len() != n || game.players().iter().any(|p| payments.get(p).is_none()) {
        return Err(SharingError::DimensionMismatch {
            payments: payments.len(),
            game: n,
        });
    }
    let pay: Vec<Rat> = game
        .players()
        .iter()
        .map(|p| payments.get(p).expect("checked above").clone())
        .collect();

    let ir_ok = pay.iter().all(|r| !r.is_negative());
    let total: Rat = pay.iter().sum();
    let grand = game.grand_value();
    let bb_ok = total <= grand;
    let eff_ok = total == grand;

    let violated_coalitions = match &mode {
        CheckMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_PLAYERS {
                return Err(SharingError::ExhaustiveTooLarge {
                    players: n,
                    limit: MAX_EXHAUSTIVE_PLAYERS,
                });
            }
            exhaustive_violations(game, &pay, exec)
        }
        CheckMode::Sampled { seed, count } => sampled_violations(game, &pay, *seed, *count),
    };

    Ok(CoreReport {
        ir_ok,
        bb_ok,
        eff_ok,
        cr_ok: violated_coalitions.is_empty(),
        violated_coalitions,
        mode,
    })
}

/// Scans all coalitions in chunks; within a chunk, payments and per-trade
/// membership counters are maintained incrementally along a Gray-code walk,
/// so each step costs one payment update plus the trades touching the
/// toggled player.
fn exhaustive_violations(game: &CoalitionGame, pay: &[Rat], exec: ExecMode) -> Vec<CoreViolation> {
    let n = game.player_count();
    let total = 1u64 << n;
    let chunks = match exec {
        ExecMode::Sequential => 1usize,
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            if n >= 14 {
                64
            } else {
                1
            }
        }
    };
    let chunk_len = total / chunks as u64;
    let mut found: Vec<CoreViolation> = par::run_map_range(exec, 0..chunks, |c| {
        let start = c as u64 * chunk_len;
        let end = if c + 1 == chunks {
            total
        } else {
            start + chunk_len
        };
        scan_gray_range(game, pay, start, end)
    })
    .into_iter()
    .flatten()
    .collect();
    found.sort_by_key(|v| v.coalition.clone());
    found
}

/// Checks coalitions with Gray-code ranks in `start..end`.
fn scan_gray_range(game: &CoalitionGame, pay: &[Rat], start: u64, end: u64) -> Vec<CoreViolation> {
    let n = game.player_count();
    // Trades touching each player, for incremental value updates.
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, (s, b, _)) in game.trades().iter().enumerate() {
        touching[*s as usize].push(t);
        if b != s {
            touching[*b as usize].push(t);
        }
    }
    let gray = |i: u64| i ^ (i >> 1);

    let mut mask = gray(start);
    let mut p_sum = Rat::zero();
    let mut v_sum = Rat::zero();
    let mut members = vec![0u8; game.trades().len()];
    for i in 0..n {
        if mask & (1u64 << i) != 0 {
            p_sum += &pay[i];
            for &t in &touching[i] {
                bump(game, &mut members, &mut v_sum, t, 1);
            }
        }
    }

    let mut out = Vec::new();
    let mut rank = start;
    loop {
        if p_sum < v_sum {
            out.push(CoreViolation {
                coalition: game.mask_players(mask),
                value: v_sum.clone(),
                payment: p_sum.clone(),
            });
        }
        rank += 1;
        if rank >= end {
            break;
        }
        let next = gray(rank);
        let toggled = (next ^ mask).trailing_zeros() as usize;
        let added = next & (1u64 << toggled) != 0;
        if added {
            p_sum += &pay[toggled];
        } else {
            p_sum -= &pay[toggled];
        }
        for &t in &touching[toggled] {
            bump(game, &mut members, &mut v_sum, t, if added { 1 } else { -1 });
        }
        mask = next;
    }
    out
}

/// Adjusts a trade's member count and folds its profit into the running
/// coalition value when the count crosses 2 (both endpoints present).
fn bump(game: &CoalitionGame, members: &mut [u8], v_sum: &mut Rat, trade: usize, delta: i8) {
    let (s, b, profit) = &game.trades()[trade];
    let full = if s == b { 1 } else { 2 };
    let before = members[trade];
    let after = (before as i8 + delta) as u8;
    members[trade] = after;
    if after == full && before < full {
        *v_sum += profit;
    } else if before == full && after < full {
        *v_sum -= profit;
    }
}

fn sampled_violations(game: &CoalitionGame, pay: &[Rat], seed: u64, count: usize) -> Vec<CoreViolation> {
    let n = game.player_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..count {
        let mask: u64 = if n >= 64 {
            rng.gen()
        } else {
            rng.gen_range(0..(1u64 << n))
        };
        let value = game.value_mask(mask);
        let payment: Rat = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &pay[i])
            .sum();
        if payment < value {
            out.push(CoreViolation {
                coalition: game.mask_players(mask),
                value,
                payment,
            });
        }
    }
    out.sort_by_key(|v| v.coalition.clone());
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{build_game, solve_exchange};
    use crate::fixtures;
    use crate::flow::max_flow;

    fn pv(pairs: &[(&str, i64)]) -> PaymentVector {
        PaymentVector::from_pairs(
            pairs
                .iter()
                .map(|(p, v)| (PlayerId::from(*p), Rat::from_int(*v))),
        )
    }

    #[test]
    fn e2_graph_shape() {
        let sol = solve_exchange(&fixtures::e2()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        assert_eq!(psg.network().node_count(), 5);
        assert_eq!(psg.network().edge_count(), 5);
        assert_eq!(psg.total_profit(), &Rat::from_int(8));
    }

    #[test]
    fn e1_graph_shape() {
        let sol = solve_exchange(&fixtures::e1()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        assert_eq!(psg.network().node_count(), 7);
        assert_eq!(psg.network().edge_count(), 9);
    }

    #[test]
    fn f1_graph_shape() {
        let sol = solve_exchange(&fixtures::f1()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        assert_eq!(psg.network().node_count(), 14);
        assert_eq!(psg.network().edge_count(), 20);
    }

    #[test]
    fn max_flow_value_is_total_profit_and_source_edges_saturate() {
        for (_, inst) in fixtures::all() {
            let sol = solve_exchange(&inst).unwrap();
            let psg = build_profit_sharing_graph(&sol).unwrap();
            let f = max_flow(psg.network()).unwrap();
            assert_eq!(f.value(), psg.total_profit());
            for (i, &e) in psg.source_edges().iter().enumerate() {
                assert_eq!(f.edge_value(e), &psg.trade_profits()[i]);
            }
        }
    }

    #[test]
    fn payments_zero_flow() {
        let sol = solve_exchange(&fixtures::e2()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let zero = Flow::zero(psg.network());
        let p = extract_payments(&psg, &zero);
        assert!(p.iter().all(|(_, r)| r.is_zero()));
    }

    #[test]
    fn payments_split_total() {
        let sol = solve_exchange(&fixtures::e2()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let f = max_flow(psg.network()).unwrap();
        let p = extract_payments(&psg, &f);
        assert_eq!(p.total(), Rat::from_int(8));
    }

    #[test]
    fn hand_routed_e1_payments() {
        // Route trade 1 (profit 6) as 4 to A, 2 to B; trade 2 (profit 2)
        // entirely to C.
        let sol = solve_exchange(&fixtures::e1()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let mut values = vec![Rat::zero(); psg.network().edge_count()];
        values[psg.source_edges()[0].index()] = Rat::from_int(6);
        values[psg.source_edges()[1].index()] = Rat::from_int(2);
        // Trade-to-contract edges follow the source edges: (t0->A, t0->B),
        // (t1->B, t1->C).
        values[2] = Rat::from_int(4);
        values[3] = Rat::from_int(2);
        values[4] = Rat::zero();
        values[5] = Rat::from_int(2);
        // Payment edges per player order A, B, C.
        values[psg.payment_edge(0).index()] = Rat::from_int(4);
        values[psg.payment_edge(1).index()] = Rat::from_int(2);
        values[psg.payment_edge(2).index()] = Rat::from_int(2);
        let flow = Flow::from_values(psg.network(), values);
        flow.validate(psg.network()).unwrap();
        let p = extract_payments(&psg, &flow);
        assert_eq!(p, pv(&[("A", 4), ("B", 2), ("C", 2)]));
    }

    #[test]
    fn extended_in_edges_examples() {
        let sol = solve_exchange(&fixtures::e1()).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let just_c: BTreeSet<PlayerId> = [PlayerId::from("C")].into();
        let got = extended_in_edges(&psg, &just_c);
        // C's contract neighbors the second profit node and the sink, so the
        // set is that trade's source edge plus every payment edge.
        let mut expect: BTreeSet<EdgeId> = psg.payment_edges().iter().copied().collect();
        expect.insert(psg.source_edges()[1]);
        assert_eq!(got, expect);

        let everyone: BTreeSet<PlayerId> = psg.players().iter().cloned().collect();
        let got_all = extended_in_edges(&psg, &everyone);
        let mut expect_all: BTreeSet<EdgeId> = psg.payment_edges().iter().copied().collect();
        expect_all.extend(psg.source_edges().iter().copied());
        assert_eq!(got_all, expect_all);

        let sol3 = solve_exchange(&fixtures::e3()).unwrap();
        let psg3 = build_profit_sharing_graph(&sol3).unwrap();
        let just_a: BTreeSet<PlayerId> = [PlayerId::from("A")].into();
        let got3 = extended_in_edges(&psg3, &just_a);
        let mut expect3: BTreeSet<EdgeId> = psg3.payment_edges().iter().copied().collect();
        expect3.insert(psg3.source_edges()[0]);
        assert_eq!(got3, expect3);
    }

    #[test]
    fn core_check_e1_examples() {
        let sol = solve_exchange(&fixtures::e1()).unwrap();
        let game = build_game(&sol).unwrap();

        let good = check_core(&pv(&[("A", 4), ("B", 2), ("C", 2)]), &game, CheckMode::Exhaustive)
            .unwrap();
        assert!(good.ir_ok && good.eff_ok && good.cr_ok && good.bb_ok);
        assert!(good.in_core());

        let skewed = check_core(&pv(&[("A", 8), ("B", 0), ("C", 0)]), &game, CheckMode::Exhaustive)
            .unwrap();
        assert!(!skewed.cr_ok);
        assert_eq!(skewed.violated_coalitions.len(), 1);
        let v = &skewed.violated_coalitions[0];
        assert_eq!(v.coalition, vec![PlayerId::from("B"), PlayerId::from("C")]);
        assert_eq!(v.value, Rat::from_int(2));
        assert_eq!(v.payment, Rat::zero());

        let another = check_core(&pv(&[("A", 3), ("B", 3), ("C", 2)]), &game, CheckMode::Exhaustive)
            .unwrap();
        assert!(another.in_core());
    }

    #[test]
    fn dimension_mismatch_detected() {
        let sol = solve_exchange(&fixtures::e1()).unwrap();
        let game = build_game(&sol).unwrap();
        assert!(matches!(
            check_core(&pv(&[("A", 8)]), &game, CheckMode::Exhaustive),
            Err(SharingError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sampled_mode_is_labeled_and_seeded() {
        let sol = solve_exchange(&fixtures::e1()).unwrap();
        let game = build_game(&sol).unwrap();
        let mode = CheckMode::Sampled { seed: 7, count: 64 };
        let r1 = check_core(&pv(&[("A", 8), ("B", 0), ("C", 0)]), &game, mode.clone()).unwrap();
        let r2 = check_core(&pv(&[("A", 8), ("B", 0), ("C", 0)]), &game, mode.clone()).unwrap();
        assert_eq!(r1.violated_coalitions, r2.violated_coalitions);
        assert_eq!(r1.mode, mode);
        // 64 samples over 8 coalitions will hit the violated pair.
        assert!(!r1.cr_ok);
    }

    #[test]
    fn exhaustive_modes_agree() {
        let sol = solve_exchange(&fixtures::f1()).unwrap();
        let game = build_game(&sol).unwrap();
        let p = pv(&[
            ("s1", 1),
            ("d1", 0),
            ("s2", 1),
            ("d2", 1),
            ("s3", 1),
            ("d3", 2),
            ("s4", 2),
            ("d4", 2),
        ]);
        let seq = check_core_with(&p, &game, CheckMode::Exhaustive, ExecMode::Sequential).unwrap();
        #[cfg(feature = "parallel")]
        {
            let par =
                check_core_with(&p, &game, CheckMode::Exhaustive, ExecMode::Parallel).unwrap();
            assert_eq!(seq.violated_coalitions, par.violated_coalitions);
            assert_eq!(seq.cr_ok, par.cr_ok);
        }
        // d1 is paid 0 while the (s1, d1) pair is worth 1: {d1, s1} is fine
        // (1 >= 1), but {d1} alone is fine too; the full vector pays 10 = C.
        assert!(seq.eff_ok);
    }
}
