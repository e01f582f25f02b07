//! Built-in example instances, mirrored by the JSON files under
//! `fixtures/` at the repository root.

use crate::exchange::{validate_instance, EdgeDoc, ExchangeInstance, InstanceDoc, NodeDoc, NodeKind, PlayerId};
use crate::rat::Rat;

fn node(id: u32, kind: NodeKind, player: Option<&str>) -> NodeDoc {
    NodeDoc {
        id,
        kind,
        player: player.map(PlayerId::from),
    }
}

fn edge(id: u32, tail: u32, head: u32, upper: i64, profit: i64) -> EdgeDoc {
    EdgeDoc {
        id,
        tail,
        head,
        upper: Rat::from_int(upper),
        profit: Rat::from_int(profit),
    }
}

fn players(ids: &[&str]) -> Vec<PlayerId> {
    ids.iter().map(|p| PlayerId::from(*p)).collect()
}

/// "pair": one trade A -> B of 4 units at profit 2 per unit.
pub fn e2_doc() -> InstanceDoc {
    InstanceDoc {
        players: players(&["A", "B"]),
        nodes: vec![
            node(0, NodeKind::Source, None),
            node(1, NodeKind::Sink, None),
            node(2, NodeKind::Contract, Some("A")),
            node(3, NodeKind::Contract, Some("B")),
        ],
        edges: vec![
            edge(0, 0, 2, 4, 0),
            edge(1, 2, 3, 4, 2),
            edge(2, 3, 1, 4, 0),
        ],
    }
}

/// "chain": A sells 6 to B, B sells 2 to C; B is buyer in the first trade
/// and seller in the second.
pub fn e1_doc() -> InstanceDoc {
    InstanceDoc {
        players: players(&["A", "B", "C"]),
        nodes: vec![
            node(0, NodeKind::Source, None),
            node(1, NodeKind::Sink, None),
            node(2, NodeKind::Contract, Some("A")),
            node(3, NodeKind::Contract, Some("B")),
            node(4, NodeKind::Contract, Some("C")),
        ],
        edges: vec![
            edge(0, 0, 2, 6, 0),
            edge(1, 2, 3, 6, 1),
            edge(2, 3, 1, 6, 0),
            edge(3, 0, 3, 2, 0),
            edge(4, 3, 4, 2, 1),
            edge(5, 4, 1, 2, 0),
        ],
    }
}

/// "twopairs": disjoint trades (A,B): 5 units at profit 2, and (C,D):
/// 2 units at profit 1.
pub fn e3_doc() -> InstanceDoc {
    InstanceDoc {
        players: players(&["A", "B", "C", "D"]),
        nodes: vec![
            node(0, NodeKind::Source, None),
            node(1, NodeKind::Sink, None),
            node(2, NodeKind::Contract, Some("A")),
            node(3, NodeKind::Contract, Some("B")),
            node(4, NodeKind::Contract, Some("C")),
            node(5, NodeKind::Contract, Some("D")),
        ],
        edges: vec![
            edge(0, 0, 2, 5, 0),
            edge(1, 2, 3, 5, 2),
            edge(2, 3, 1, 5, 0),
            edge(3, 0, 4, 2, 0),
            edge(4, 4, 5, 2, 1),
            edge(5, 5, 1, 2, 0),
        ],
    }
}

/// "fig1": four disjoint unit trades s_i -> d_i with profits 1..4.
pub fn f1_doc() -> InstanceDoc {
    let names = ["s1", "d1", "s2", "d2", "s3", "d3", "s4", "d4"];
    let mut nodes = vec![
        node(0, NodeKind::Source, None),
        node(1, NodeKind::Sink, None),
    ];
    for (i, name) in names.iter().enumerate() {
        nodes.push(node(2 + i as u32, NodeKind::Contract, Some(name)));
    }
    let mut edges = Vec::new();
    for i in 0..4u32 {
        let seller = 2 + 2 * i;
        let buyer = 3 + 2 * i;
        let base = 3 * i;
        edges.push(edge(base, 0, seller, 1, 0));
        edges.push(edge(base + 1, seller, buyer, 1, i as i64 + 1));
        edges.push(edge(base + 2, buyer, 1, 1, 0));
    }
    InstanceDoc {
        players: players(&names),
        nodes,
        edges,
    }
}

pub fn e1() -> ExchangeInstance {
    validate_instance(&e1_doc()).expect("fixture E1 is valid")
}

pub fn e2() -> ExchangeInstance {
    validate_instance(&e2_doc()).expect("fixture E2 is valid")
}

pub fn e3() -> ExchangeInstance {
    validate_instance(&e3_doc()).expect("fixture E3 is valid")
}

pub fn f1() -> ExchangeInstance {
    validate_instance(&f1_doc()).expect("fixture F1 is valid")
}

/// All fixtures with their canonical names.
pub fn all() -> Vec<(&'static str, ExchangeInstance)> {
    vec![("E1", e1()), ("E2", e2()), ("E3", e3()), ("F1", f1())]
}

/// All fixture documents with their canonical names, for writing files.
pub fn all_docs() -> Vec<(&'static str, InstanceDoc)> {
    vec![
        ("E1", e1_doc()),
        ("E2", e2_doc()),
        ("E3", e3_doc()),
        ("F1", f1_doc()),
    ]
}
