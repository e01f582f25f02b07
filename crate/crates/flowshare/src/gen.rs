//! Seeded random instance generation.
//!
//! Instances are built so that the optimal flow's path decomposition is
//! unambiguous: players are split into sellers and buyers, every trade is a
//! direct seller-to-buyer edge, and each contract node has a single
//! terminal edge sized to carry all of its trades. Ids, node numbering, and
//! edge numbering are fully determined by the seed, so generation is
//! reproducible across runs and platforms.

use crate::exchange::{EdgeDoc, InstanceDoc, NodeDoc, NodeKind, PlayerId};
use crate::rat::Rat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Knobs for [`generate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub players: usize,
    pub trades: usize,
    /// Trade capacities are drawn uniformly from `1..=max_capacity`.
    pub max_capacity: u64,
    /// Per-unit trade profits are drawn uniformly from `0..=max_profit`.
    pub max_profit: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            players: 6,
            trades: 8,
            max_capacity: 10,
            max_profit: 10,
        }
    }
}

/// Builds a random exchange instance. Requires at least two players.
pub fn generate(params: &GenParams, seed: u64) -> InstanceDoc {
    assert!(params.players >= 2, "need at least two players");
    assert!(params.max_capacity >= 1, "capacities start at 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.players;
    let sellers = (n + 1) / 2;

    let width = n.to_string().len().max(2);
    let players: Vec<PlayerId> = (0..n)
        .map(|i| PlayerId(format!("p{:0width$}", i + 1)))
        .collect();

    let mut nodes = vec![
        NodeDoc {
            id: 0,
            kind: NodeKind::Source,
            player: None,
        },
        NodeDoc {
            id: 1,
            kind: NodeKind::Sink,
            player: None,
        },
    ];
    for (i, p) in players.iter().enumerate() {
        nodes.push(NodeDoc {
            id: 2 + i as u32,
            kind: NodeKind::Contract,
            player: Some(p.clone()),
        });
    }
    let contract = |i: usize| 2 + i as u32;

    // Trades: seller index, buyer index, capacity, per-unit profit.
    let mut trades = Vec::with_capacity(params.trades);
    for _ in 0..params.trades {
        let s = rng.gen_range(0..sellers);
        let b = rng.gen_range(sellers..n);
        let cap = rng.gen_range(1..=params.max_capacity);
        let profit = rng.gen_range(0..=params.max_profit);
        trades.push((s, b, cap, profit));
    }

    // One source edge per active seller and one sink edge per active buyer,
    // each sized to carry all of the player's trades; this keeps every
    // contract node unambiguous to decompose (single edge on its terminal
    // side).
    let mut seller_load = vec![0u64; n];
    let mut buyer_load = vec![0u64; n];
    for &(s, b, cap, _) in &trades {
        seller_load[s] += cap;
        buyer_load[b] += cap;
    }

    let mut edges = Vec::new();
    let mut push = |tail: u32, head: u32, upper: u64, profit: u64| {
        edges.push(EdgeDoc {
            id: edges.len() as u32,
            tail,
            head,
            upper: Rat::from_bigint(upper.into()),
            profit: Rat::from_bigint(profit.into()),
        });
    };
    for (i, &load) in seller_load.iter().enumerate() {
        if load > 0 {
            push(0, contract(i), load, 0);
        }
    }
    for &(s, b, cap, profit) in &trades {
        push(contract(s), contract(b), cap, profit);
    }
    for (i, &load) in buyer_load.iter().enumerate() {
        if load > 0 {
            push(contract(i), 1, load, 0);
        }
    }

    InstanceDoc {
        players,
        nodes,
        edges,
    }
}

/// Corpus parameters derived from a seed: up to `max_players` players and
/// `max_trades` trades, with small integer capacities and profits. Used by
/// the test corpora and the self test.
pub fn corpus_params(seed: u64, max_players: usize, max_trades: usize) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    GenParams {
        players: rng.gen_range(2..=max_players.max(2)),
        trades: rng.gen_range(1..=max_trades.max(1)),
        max_capacity: rng.gen_range(1..=6),
        max_profit: rng.gen_range(1..=6),
    }
}

/// One corpus instance: seed-derived parameters, then seed-derived
/// contents.
pub fn corpus_instance(seed: u64, max_players: usize, max_trades: usize) -> InstanceDoc {
    generate(&corpus_params(seed, max_players, max_trades), seed)
}
