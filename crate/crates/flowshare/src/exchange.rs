//! Exchange instances and the coalition game they induce.
//!
//! An exchange is a capacitated network whose edges carry per-unit profits;
//! designated contract nodes each belong to one player. Solving the exchange
//! means routing a maximum-profit flow and decomposing it into trades, each
//! trade a source-to-sink path visiting exactly two contract nodes (its
//! seller and its buyer). Coalition values are read off the fixed optimal
//! flow: a coalition earns the profit of the trades whose both endpoints it
//! contains.

use crate::flow::{
    decompose_paths, max_profit_flow, Bound, BoundedNetwork, DirectedGraph, EdgeId, Flow,
    FlowError, NodeId,
};
use crate::rat::Rat;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Player identifier (an arbitrary non-empty string from the instance file).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub String);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for PlayerId {
    fn from(s: &str) -> Self {
        PlayerId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExchangeError {
    /// One or more instance invariants are violated; every issue is listed.
    #[error("invalid instance:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    /// A decomposed optimal path does not visit exactly two contract nodes.
    #[error("trade path {path:?} visits {contracts} contract node(s), expected exactly 2")]
    TradeStructure { path: Vec<EdgeId>, contracts: usize },

    #[error("unknown player {0}")]
    UnknownPlayer(PlayerId),

    #[error("coalition table limited to {limit} players, instance has {players}")]
    TooManyPlayers { players: usize, limit: usize },

    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Node role in an instance document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Source,
    Sink,
    Contract,
    Internal,
}

/// One node record of the on-disk instance format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: u32,
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub player: Option<PlayerId>,
}

/// One edge record of the on-disk instance format. All numbers are integers
/// or `"p/q"` strings; lower bounds are fixed at zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: u32,
    pub tail: u32,
    pub head: u32,
    pub upper: Rat,
    pub profit: Rat,
}

/// The on-disk instance document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub players: Vec<PlayerId>,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

impl InstanceDoc {
    pub fn from_json(text: &str) -> Result<Self, ExchangeError> {
        serde_json::from_str(text)
            .map_err(|e| ExchangeError::Validation(vec![format!("instance parse error: {e}")]))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("instance serialization");
        out.push('\n');
        out
    }
}

/// A validated exchange: network, per-edge profits, and the player/contract
/// assignment.
#[derive(Debug, Clone)]
pub struct ExchangeInstance {
    network: BoundedNetwork,
    profit: Vec<Rat>,
    players: Vec<PlayerId>,
    contract_of: Vec<NodeId>,
    player_at: BTreeMap<NodeId, usize>,
}

impl ExchangeInstance {
    pub fn network(&self) -> &BoundedNetwork {
        &self.network
    }

    pub fn profits(&self) -> &[Rat] {
        &self.profit
    }

    pub fn profit(&self, e: EdgeId) -> &Rat {
        &self.profit[e.index()]
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn player_index(&self, p: &PlayerId) -> Option<usize> {
        self.players.iter().position(|q| q == p)
    }

    /// Contract node of the player at `index` (player order).
    pub fn contract_node(&self, index: usize) -> NodeId {
        self.contract_of[index]
    }

    /// Player owning `node`, if it is a contract node.
    pub fn player_at(&self, node: NodeId) -> Option<usize> {
        self.player_at.get(&node).copied()
    }

    /// Same instance with every profit multiplied by an integer factor.
    pub fn scale_profits(&self, k: i64) -> ExchangeInstance {
        let factor = Rat::from_int(k);
        let mut scaled = self.clone();
        for p in &mut scaled.profit {
            *p = &*p * &factor;
        }
        scaled
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let g = self.network.graph();
        let nodes = g
            .node_ids()
            .map(|n| {
                let kind = if n == self.network.source() {
                    NodeKind::Source
                } else if n == self.network.sink() {
                    NodeKind::Sink
                } else if self.player_at.contains_key(&n) {
                    NodeKind::Contract
                } else {
                    NodeKind::Internal
                };
                NodeDoc {
                    id: n.0,
                    kind,
                    player: self.player_at.get(&n).map(|&i| self.players[i].clone()),
                }
            })
            .collect();
        let edges = g
            .edge_ids()
            .map(|e| EdgeDoc {
                id: e.0,
                tail: g.tail(e).0,
                head: g.head(e).0,
                upper: self
                    .network
                    .upper(e)
                    .as_finite()
                    .expect("instance uppers are finite")
                    .clone(),
                profit: self.profit[e.index()].clone(),
            })
            .collect();
        InstanceDoc {
            players: self.players.clone(),
            nodes,
            edges,
        }
    }
}

/// Checks every instance invariant and builds the typed instance.
/// All violations are reported at once.
pub fn validate_instance(doc: &InstanceDoc) -> Result<ExchangeInstance, ExchangeError> {
    let mut issues: Vec<String> = Vec::new();
    let n = doc.nodes.len();
    let m = doc.edges.len();

    // Dense, unique ids in record order.
    for (i, node) in doc.nodes.iter().enumerate() {
        if node.id as usize != i {
            issues.push(format!(
                "node record {i} has id {}; ids must be dense 0..{n} in order",
                node.id
            ));
        }
    }
    for (i, edge) in doc.edges.iter().enumerate() {
        if edge.id as usize != i {
            issues.push(format!(
                "edge record {i} has id {}; ids must be dense 0..{m} in order",
                edge.id
            ));
        }
    }

    let mut seen_players = BTreeSet::new();
    for p in &doc.players {
        if p.0.is_empty() {
            issues.push("empty player id".into());
        }
        if !seen_players.insert(p.clone()) {
            issues.push(format!("duplicate player id {p}"));
        }
    }

    let sources: Vec<usize> = doc
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, nd)| nd.kind == NodeKind::Source)
        .map(|(i, _)| i)
        .collect();
    let sinks: Vec<usize> = doc
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, nd)| nd.kind == NodeKind::Sink)
        .map(|(i, _)| i)
        .collect();
    if sources.len() != 1 {
        issues.push(format!(
            "expected exactly one source node, found {}",
            sources.len()
        ));
    }
    if sinks.len() != 1 {
        issues.push(format!(
            "expected exactly one sink node, found {}",
            sinks.len()
        ));
    }

    let mut contracts_of_player: BTreeMap<PlayerId, Vec<usize>> = BTreeMap::new();
    for (i, node) in doc.nodes.iter().enumerate() {
        match (&node.kind, &node.player) {
            (NodeKind::Contract, Some(p)) => {
                if !seen_players.contains(p) {
                    issues.push(format!("contract node {i} references unknown player {p}"));
                }
                contracts_of_player.entry(p.clone()).or_default().push(i);
            }
            (NodeKind::Contract, None) => {
                issues.push(format!("contract node {i} has no player"));
            }
            (_, Some(p)) => {
                issues.push(format!(
                    "non-contract node {i} must not name a player (has {p})"
                ));
            }
            _ => {}
        }
    }
    for p in &doc.players {
        match contracts_of_player.get(p).map(Vec::len).unwrap_or(0) {
            1 => {}
            0 => issues.push(format!("player {p} owns no contract node")),
            k => issues.push(format!("player {p} owns {k} contract nodes, expected 1")),
        }
    }

    for edge in &doc.edges {
        if edge.tail as usize >= n || edge.head as usize >= n {
            issues.push(format!(
                "edge {} references missing node ({} -> {})",
                edge.id, edge.tail, edge.head
            ));
        } else if edge.tail == edge.head {
            issues.push(format!(
                "edge {} is a self-loop on node {}",
                edge.id, edge.tail
            ));
        }
        if edge.upper.is_negative() {
            issues.push(format!(
                "edge {}: negative capacity {}",
                edge.id, edge.upper
            ));
        }
        if edge.profit.is_negative() {
            issues.push(format!("edge {}: negative profit {}", edge.id, edge.profit));
        }
    }

    if !issues.is_empty() {
        return Err(ExchangeError::Validation(issues));
    }

    let mut graph = DirectedGraph::new();
    for node in &doc.nodes {
        let label = match (&node.kind, &node.player) {
            (NodeKind::Source, _) => "source".to_string(),
            (NodeKind::Sink, _) => "sink".to_string(),
            (NodeKind::Contract, Some(p)) => p.0.clone(),
            _ => format!("n{}", node.id),
        };
        graph.add_node(label);
    }
    let mut upper = Vec::with_capacity(m);
    let mut profit = Vec::with_capacity(m);
    for edge in &doc.edges {
        graph
            .add_edge(NodeId(edge.tail), NodeId(edge.head))
            .map_err(|e| ExchangeError::Validation(vec![e.to_string()]))?;
        upper.push(Bound::Finite(edge.upper.clone()));
        profit.push(edge.profit.clone());
    }
    let source = NodeId(sources[0] as u32);
    let sink = NodeId(sinks[0] as u32);
    let network = BoundedNetwork::with_upper_bounds(graph, upper, source, sink)
        .map_err(|e| ExchangeError::Validation(vec![e.to_string()]))?;

    let players = doc.players.clone();
    let contract_of: Vec<NodeId> = players
        .iter()
        .map(|p| NodeId(contracts_of_player[p][0] as u32))
        .collect();
    let player_at: BTreeMap<NodeId, usize> = contract_of
        .iter()
        .enumerate()
        .map(|(i, &node)| (node, i))
        .collect();

    Ok(ExchangeInstance {
        network,
        profit,
        players,
        contract_of,
        player_at,
    })
}

/// One executed trade: a path from the source to the sink whose interior
/// visits exactly the seller's and the buyer's contract nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trade {
    pub seller: PlayerId,
    pub buyer: PlayerId,
    pub path_edges: Vec<EdgeId>,
    pub amount: Rat,
    /// `amount` times the per-unit profit along the path.
    pub profit: Rat,
}

/// The solved exchange: optimal flow, its total profit, and the trade list.
#[derive(Debug, Clone)]
pub struct TradeSolution {
    pub players: Vec<PlayerId>,
    pub flow: Flow,
    pub total_profit: Rat,
    pub trades: Vec<Trade>,
    /// True when some support node has several inflows and several
    /// outflows, i.e. a different path pairing could have produced a
    /// different trade list. The deterministic decomposition rule picks
    /// one; reports surface the flag.
    pub ambiguous_decomposition: bool,
}

/// Routes the maximum-profit flow and decomposes it into two-contract
/// trades.
pub fn solve_exchange(inst: &ExchangeInstance) -> Result<TradeSolution, ExchangeError> {
    let net = inst.network();
    let flow = max_profit_flow(net, inst.profits())?;
    let flow = localize_trades(inst, flow)?;
    let total_profit: Rat = inst
        .profits()
        .iter()
        .zip(flow.values())
        .map(|(c, f)| c * f)
        .sum();

    let paths = decompose_paths(&flow, net)?;
    let mut trades = Vec::with_capacity(paths.len());
    for path in paths {
        let mut contracts: Vec<usize> = Vec::new();
        for &e in &path.edges {
            let head = net.graph().head(e);
            if let Some(idx) = inst.player_at(head) {
                contracts.push(idx);
            }
        }
        if contracts.len() != 2 {
            return Err(ExchangeError::TradeStructure {
                path: path.edges,
                contracts: contracts.len(),
            });
        }
        let unit_profit: Rat = path.edges.iter().map(|e| inst.profit(*e)).sum();
        let profit = &path.amount * &unit_profit;
        trades.push(Trade {
            seller: inst.players()[contracts[0]].clone(),
            buyer: inst.players()[contracts[1]].clone(),
            path_edges: path.edges,
            amount: path.amount,
            profit,
        });
    }
    debug_assert_eq!(trades.iter().map(|t| &t.profit).sum::<Rat>(), total_profit);

    let ambiguous_decomposition = has_repairable_junction(net, &flow);
    Ok(TradeSolution {
        players: inst.players().to_vec(),
        flow,
        total_profit,
        trades,
        ambiguous_decomposition,
    })
}

/// Reroutes a profit-optimal flow so that every decomposed path visits
/// exactly two contract nodes.
///
/// A middleman contract (a player buying in one trade and selling in
/// another) can end up with through-flow: the optimum happily routes a
/// buyer's units onward instead of drawing fresh units from the terminals,
/// which chains three or more contracts onto one path. Pushing the chained
/// amount along zero-profit residual legs `source -> middleman` and
/// `middleman -> sink` keeps the objective and all bounds intact while
/// splitting the chain. Each round strictly increases the flow value, so
/// the loop terminates; when no zero-profit legs exist the chain is
/// structural and surfaces as [`ExchangeError::TradeStructure`].
fn localize_trades(inst: &ExchangeInstance, flow: Flow) -> Result<Flow, ExchangeError> {
    let net = inst.network();
    let mut values = flow.into_values();
    'rounds: loop {
        let current = Flow::from_values(net, values.clone());
        let paths = decompose_paths(&current, net)?;
        for path in &paths {
            let contracts: Vec<NodeId> = path
                .edges
                .iter()
                .map(|&e| net.graph().head(e))
                .filter(|head| inst.player_at(*head).is_some())
                .collect();
            if contracts.len() <= 2 {
                continue;
            }
            let middleman = contracts[1];
            let leg1 = zero_profit_leg(inst, &values, net.source(), middleman).ok_or_else(|| {
                ExchangeError::TradeStructure {
                    path: path.edges.clone(),
                    contracts: contracts.len(),
                }
            })?;
            let amount = leg_bottleneck(inst, &values, &leg1).min(path.amount.clone());
            apply_leg(&mut values, &leg1, &amount);
            let refund = match zero_profit_leg(inst, &values, middleman, net.sink()) {
                Some(leg2) => {
                    let a2 = leg_bottleneck(inst, &values, &leg2).min(amount.clone());
                    apply_leg(&mut values, &leg2, &a2);
                    &amount - &a2
                }
                None => amount.clone(),
            };
            if !refund.is_zero() {
                // Roll the first leg back to match what the second leg
                // could carry.
                let neg = -&refund;
                apply_leg(&mut values, &leg1, &neg);
            }
            if refund == amount {
                return Err(ExchangeError::TradeStructure {
                    path: path.edges.clone(),
                    contracts: contracts.len(),
                });
            }
            continue 'rounds;
        }
        return Ok(Flow::from_values(net, values));
    }
}

/// Lowest-edge-id BFS over residual arcs of zero-profit edges.
fn zero_profit_leg(
    inst: &ExchangeInstance,
    values: &[Rat],
    from: NodeId,
    to: NodeId,
) -> Option<Vec<crate::flow::network::ResArc>> {
    use std::collections::VecDeque;
    let net = inst.network();
    let mut parent: Vec<Option<(NodeId, crate::flow::network::ResArc)>> =
        vec![None; net.node_count()];
    let mut seen = vec![false; net.node_count()];
    seen[from.index()] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &arc in net.arcs_from(u) {
            if !inst.profit(arc.edge).is_zero() {
                continue;
            }
            let open = if arc.forward {
                match net.upper(arc.edge) {
                    Bound::Finite(cap) => &values[arc.edge.index()] < cap,
                    Bound::Infinite => true,
                }
            } else {
                values[arc.edge.index()].is_positive()
            };
            if !open {
                continue;
            }
            let v = net.arc_target(arc);
            if seen[v.index()] {
                continue;
            }
            seen[v.index()] = true;
            parent[v.index()] = Some((u, arc));
            queue.push_back(v);
        }
    }
    if !seen[to.index()] {
        return None;
    }
    let mut leg = Vec::new();
    let mut cursor = to;
    while cursor != from {
        let (prev, arc) = parent[cursor.index()].expect("parent chain");
        leg.push(arc);
        cursor = prev;
    }
    leg.reverse();
    Some(leg)
}

fn leg_bottleneck(inst: &ExchangeInstance, values: &[Rat], leg: &[crate::flow::network::ResArc]) -> Rat {
    let net = inst.network();
    leg.iter()
        .map(|arc| {
            if arc.forward {
                match net.upper(arc.edge) {
                    Bound::Finite(cap) => cap - &values[arc.edge.index()],
                    Bound::Infinite => unreachable!("exchange uppers are finite"),
                }
            } else {
                values[arc.edge.index()].clone()
            }
        })
        .min()
        .expect("leg nonempty")
}

fn apply_leg(values: &mut [Rat], leg: &[crate::flow::network::ResArc], amount: &Rat) {
    for arc in leg {
        if arc.forward {
            values[arc.edge.index()] += amount;
        } else {
            values[arc.edge.index()] -= amount;
        }
    }
}

/// A node with two or more positive inflows and two or more positive
/// outflows admits more than one in/out pairing during decomposition.
fn has_repairable_junction(net: &BoundedNetwork, flow: &Flow) -> bool {
    net.graph().node_ids().any(|v| {
        let mut ins = 0usize;
        let mut outs = 0usize;
        for arc in net.arcs_from(v) {
            if flow.edge_value(arc.edge).is_positive() {
                if arc.forward {
                    outs += 1;
                } else {
                    ins += 1;
                }
            }
        }
        ins >= 2 && outs >= 2
    })
}

/// Profit of the trades fully contained in `coalition`, at the fixed
/// optimal flow.
pub fn coalition_value(
    sol: &TradeSolution,
    coalition: &BTreeSet<PlayerId>,
) -> Result<Rat, ExchangeError> {
    for p in coalition {
        if !sol.players.contains(p) {
            return Err(ExchangeError::UnknownPlayer(p.clone()));
        }
    }
    Ok(sol
        .trades
        .iter()
        .filter(|t| coalition.contains(&t.seller) && coalition.contains(&t.buyer))
        .map(|t| &t.profit)
        .sum())
}

/// Largest player count for which [`build_game`] materializes the full
/// coalition table.
pub const MAX_TABLE_PLAYERS: usize = 20;

/// The induced cooperative game. Coalitions over up to 32 players are
/// addressed as bitmasks in player order; the value table, when present,
/// stores all `2^n` coalition values.
#[derive(Debug, Clone)]
pub struct CoalitionGame {
    players: Vec<PlayerId>,
    /// (seller index, buyer index, profit) per trade.
    trades: Vec<(u32, u32, Rat)>,
    table: Option<Vec<Rat>>,
}

impl CoalitionGame {
    /// Game with on-demand evaluation, for player counts where the table
    /// is too large. Coalitions are 64-bit masks, so at most 64 players.
    pub fn lazy(sol: &TradeSolution) -> CoalitionGame {
        assert!(sol.players.len() <= 64, "coalition masks are 64-bit");
        let index: BTreeMap<&PlayerId, u32> = sol
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i as u32))
            .collect();
        let trades = sol
            .trades
            .iter()
            .map(|t| (index[&t.seller], index[&t.buyer], t.profit.clone()))
            .collect();
        CoalitionGame {
            players: sol.players.clone(),
            trades,
            table: None,
        }
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn full_mask(&self) -> u64 {
        if self.players.len() >= 64 {
            u64::MAX
        } else {
            (1u64 << self.players.len()) - 1
        }
    }

    /// Coalition value by player-index bitmask.
    pub fn value_mask(&self, mask: u64) -> Rat {
        if let Some(table) = &self.table {
            return table[mask as usize].clone();
        }
        self.trades
            .iter()
            .filter(|(s, b, _)| mask & (1u64 << s) != 0 && mask & (1u64 << b) != 0)
            .map(|(_, _, p)| p)
            .sum()
    }

    /// Coalition value by player-id set.
    pub fn value_set(&self, coalition: &BTreeSet<PlayerId>) -> Result<Rat, ExchangeError> {
        let mut mask = 0u64;
        for p in coalition {
            match self.players.iter().position(|q| q == p) {
                Some(i) => mask |= 1u64 << i,
                None => return Err(ExchangeError::UnknownPlayer(p.clone())),
            }
        }
        Ok(self.value_mask(mask))
    }

    pub fn grand_value(&self) -> Rat {
        self.value_mask(self.full_mask())
    }

    pub fn trades(&self) -> &[(u32, u32, Rat)] {
        &self.trades
    }

    pub fn table(&self) -> Option<&[Rat]> {
        self.table.as_deref()
    }

    pub fn mask_players(&self, mask: u64) -> Vec<PlayerId> {
        (0..self.players.len())
            .filter(|i| mask & (1u64 << i) != 0)
            .map(|i| self.players[i].clone())
            .collect()
    }
}

/// Materializes the full `2^n` coalition value table.
pub fn build_game(sol: &TradeSolution) -> Result<CoalitionGame, ExchangeError> {
    let n = sol.players.len();
    if n > MAX_TABLE_PLAYERS {
        return Err(ExchangeError::TooManyPlayers {
            players: n,
            limit: MAX_TABLE_PLAYERS,
        });
    }
    let mut game = CoalitionGame::lazy(sol);
    let size = 1usize << n;
    let mut table = vec![Rat::zero(); size];
    for (s, b, profit) in &game.trades {
        let pair = (1u64 << s) | (1u64 << b);
        // Add the trade's profit to every coalition containing both ends.
        let mut mask = pair;
        loop {
            table[mask as usize] += profit;
            if mask as usize >= size - 1 {
                break;
            }
            mask = (mask + 1) | pair;
            if mask as usize >= size {
                break;
            }
        }
    }
    debug_assert_eq!(table[size - 1], sol.total_profit);
    game.table = Some(table);
    Ok(game)
}
