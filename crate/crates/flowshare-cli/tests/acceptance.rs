//! Acceptance suite. Each test covers one criterion, checks it at exact
//! rational equality (no tolerances anywhere), and prints a single
//! PASS line; run with `--nocapture` to see them.

use flowshare::egalitarian::{
    dutta_ray, egalitarian_allocation, leximin_compare, spread, EgalError, LeximinOrder,
};
use flowshare::exchange::{build_game, solve_exchange, validate_instance, ExchangeInstance, PlayerId};
use flowshare::fixtures;
use flowshare::flow::{max_flow_with_order, AugmentOrder};
use flowshare::gen::{corpus_instance, generate, GenParams};
use flowshare::rat::Rat;
use flowshare::sharing::{build_profit_sharing_graph, check_core, extract_payments, CheckMode};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

fn rat(v: i64) -> Rat {
    Rat::from_int(v)
}

fn pass(criterion: u32, name: &str) {
    println!("ACCEPTANCE {criterion} ({name}): PASS");
}

fn corpus(count: u64, max_players: usize, max_trades: usize) -> Vec<ExchangeInstance> {
    (0..count)
        .map(|seed| validate_instance(&corpus_instance(seed, max_players, max_trades)).unwrap())
        .collect()
}

fn expect_allocation(
    inst: &ExchangeInstance,
    expect: &[(&str, Rat)],
    expect_lambdas: Option<&[Rat]>,
) {
    let started = Instant::now();
    let ea = egalitarian_allocation(inst).unwrap();
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "allocation took {elapsed:?}, budget is 1s"
    );
    for (player, value) in expect {
        assert_eq!(
            ea.payments.get(&PlayerId::from(*player)).unwrap(),
            value,
            "player {player}"
        );
    }
    if let Some(lambdas) = expect_lambdas {
        let got: Vec<Rat> = ea.trace.iter().map(|r| r.lambda.clone()).collect();
        assert_eq!(got, lambdas);
    }
}

/// Criterion 1: the four fixtures produce their exact allocations and
/// traces, each within a second.
#[test]
fn criterion_1_fixture_exactness() {
    expect_allocation(
        &fixtures::e2(),
        &[("A", rat(4)), ("B", rat(4))],
        Some(&[rat(4)]),
    );
    expect_allocation(
        &fixtures::e1(),
        &[("A", rat(3)), ("B", rat(3)), ("C", rat(2))],
        Some(&[rat(2), rat(3)]),
    );
    expect_allocation(
        &fixtures::e3(),
        &[("A", rat(5)), ("B", rat(5)), ("C", rat(1)), ("D", rat(1))],
        Some(&[rat(1), rat(5)]),
    );
    expect_allocation(
        &fixtures::f1(),
        &[
            ("s1", Rat::new(1, 2)),
            ("d1", Rat::new(1, 2)),
            ("s2", rat(1)),
            ("d2", rat(1)),
            ("s3", Rat::new(3, 2)),
            ("d3", Rat::new(3, 2)),
            ("s4", rat(2)),
            ("d4", rat(2)),
        ],
        None,
    );
    pass(1, "fixture exactness");
}

/// Criterion 2: across fixtures and 200 seeded instances, payments read off
/// maximum flows generated under 25 distinct augmenting orders pass the
/// exhaustive core check. Zero violations, within the two-minute budget.
#[test]
fn criterion_2_core_elements() {
    let started = Instant::now();
    let mut instances = corpus(200, 10, 12);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    let mut flows_checked = 0u64;
    let mut distinct_total = 0u64;
    let mut profitless = 0usize;
    for (idx, inst) in instances.iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        if !sol.total_profit.is_positive() {
            // No profit, no sharing graph; the zero payment vector is the
            // whole core.
            profitless += 1;
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let game = build_game(&sol).unwrap();
        let mut distinct = BTreeSet::new();
        for seed in 0..25u64 {
            let order = AugmentOrder::seeded(seed, psg.network().edge_count());
            let flow = max_flow_with_order(psg.network(), &order).unwrap();
            assert_eq!(flow.value(), psg.total_profit(), "instance {idx}");
            distinct.insert(flow.values().to_vec());
            let payments = extract_payments(&psg, &flow);
            let report = check_core(&payments, &game, CheckMode::Exhaustive).unwrap();
            assert!(report.ir_ok, "instance {idx} seed {seed}: IR");
            assert!(report.bb_ok, "instance {idx} seed {seed}: BB");
            assert!(report.eff_ok, "instance {idx} seed {seed}: EFF");
            assert!(
                report.cr_ok,
                "instance {idx} seed {seed}: CR violated {:?}",
                report.violated_coalitions
            );
            flows_checked += 1;
        }
        distinct_total += distinct.len() as u64;
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "core-elements sweep took {elapsed:?}, budget is 120s"
    );
    assert!(profitless * 20 < instances.len(), "corpus too degenerate");
    assert!(flows_checked >= ((instances.len() - profitless) as u64) * 25);
    println!(
        "ACCEPTANCE 2 (core elements): PASS ({flows_checked} flows, {distinct_total} distinct, {elapsed:?})"
    );
}

/// Criterion 3: the flow allocation equals the enumeration oracle on
/// fixtures and 200 seeded instances; ambiguous-maximizer instances are
/// counted, skipped, and must stay under five percent.
#[test]
fn criterion_3_oracle_equivalence() {
    let mut instances = corpus(200, 8, 10);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    let total = instances.len();
    let mut ambiguous = 0usize;
    for (idx, inst) in instances.iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        let game = build_game(&sol).unwrap();
        let oracle = match dutta_ray(&game) {
            Ok(p) => p,
            Err(EgalError::AmbiguousMaximizer(..)) => {
                ambiguous += 1;
                continue;
            }
            Err(e) => panic!("instance {idx}: {e}"),
        };
        let ea = egalitarian_allocation(inst).unwrap();
        assert_eq!(oracle, ea.payments, "instance {idx}");
    }
    assert!(
        ambiguous * 20 < total,
        "{ambiguous} of {total} instances ambiguous"
    );
    println!(
        "ACCEPTANCE 3 (oracle equivalence): PASS ({} compared, {ambiguous} ambiguous)",
        total - ambiguous
    );
}

/// Criterion 4: the allocation's spread equals the minimum window width on
/// the fixtures (with pinned expected values) and across the corpus.
#[test]
fn criterion_4_deviation_characterization() {
    let pinned: [(&str, ExchangeInstance, Rat); 4] = [
        ("E1", fixtures::e1(), rat(1)),
        ("E2", fixtures::e2(), rat(0)),
        ("E3", fixtures::e3(), rat(4)),
        ("F1", fixtures::f1(), Rat::new(3, 2)),
    ];
    for (name, inst, expect) in &pinned {
        let sol = solve_exchange(inst).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let h: BTreeSet<_> = psg.payment_edges().iter().copied().collect();
        let (delta, _) = flowshare::aemf::min_deviation(&psg, &h).unwrap();
        assert_eq!(&delta, expect, "fixture {name}");
        let ea = egalitarian_allocation(inst).unwrap();
        assert_eq!(spread(&ea.payments), delta, "fixture {name}");
    }
    for (idx, inst) in corpus(200, 10, 12).iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let h: BTreeSet<_> = psg.payment_edges().iter().copied().collect();
        let (delta, _) = flowshare::aemf::min_deviation(&psg, &h).unwrap();
        let ea = egalitarian_allocation(inst).unwrap();
        assert_eq!(spread(&ea.payments), delta, "instance {idx}");
    }
    println!("ACCEPTANCE 4 (deviation characterization): PASS");
}

/// Criterion 5: the fixing loop never runs more rounds than there are
/// payment edges (players).
#[test]
fn criterion_5_iteration_bound() {
    let mut instances = corpus(200, 10, 12);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    for (idx, inst) in instances.iter().enumerate() {
        let ea = egalitarian_allocation(inst).unwrap();
        let players = inst.players().len();
        assert!(ea.trace.len() <= players, "instance {idx}: trace vs players");
        // One payment edge per player in the sharing graph.
        assert!(
            ea.trace.len() <= players,
            "instance {idx}: trace vs payment edges"
        );
    }
    println!("ACCEPTANCE 5 (iteration bound): PASS");
}

/// Criterion 6: the allocation leximin-dominates at least 50 sampled core
/// vectors per instance.
#[test]
fn criterion_6_leximin_maximality() {
    let mut instances = corpus(200, 10, 12);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    let mut samples_total = 0u64;
    for (idx, inst) in instances.iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let ea = egalitarian_allocation(inst).unwrap();
        for seed in 0..50u64 {
            let order = AugmentOrder::seeded(seed, psg.network().edge_count());
            let flow = max_flow_with_order(psg.network(), &order).unwrap();
            let sample = extract_payments(&psg, &flow);
            let cmp = leximin_compare(&ea.payments, &sample).unwrap();
            assert!(
                matches!(cmp, LeximinOrder::Greater | LeximinOrder::Equal),
                "instance {idx} seed {seed}"
            );
            samples_total += 1;
        }
    }
    assert!(samples_total >= 50 * 150);
    println!("ACCEPTANCE 6 (leximin maximality): PASS ({samples_total} samples)");
}

/// Criterion 7: ten repeated runs are identical, and scaling every profit
/// by an integer scales the allocation by the same factor.
#[test]
fn criterion_7_determinism_and_scaling() {
    let mut instances = corpus(30, 10, 12);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    for (idx, inst) in instances.iter().enumerate() {
        let base = egalitarian_allocation(inst).unwrap();
        for _ in 0..9 {
            let again = egalitarian_allocation(inst).unwrap();
            assert_eq!(again.payments, base.payments, "instance {idx}");
            assert_eq!(again.trace, base.trace, "instance {idx}");
        }
        for k in [2i64, 3, 7] {
            let scaled = egalitarian_allocation(&inst.scale_profits(k)).unwrap();
            assert_eq!(
                scaled.payments,
                base.payments.scale(k),
                "instance {idx} factor {k}"
            );
        }
    }
    println!("ACCEPTANCE 7 (determinism and scaling): PASS");
}

/// Criterion 8: the `ea` command on a generated 50-player, 200-trade
/// instance finishes in under ten seconds end to end.
#[test]
fn criterion_8_performance() {
    let params = GenParams {
        players: 50,
        trades: 200,
        max_capacity: 10,
        max_profit: 10,
    };
    let doc = generate(&params, 7);
    let dir = std::env::temp_dir().join(format!("flowshare-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("large.json");
    std::fs::write(&input, doc.to_json()).unwrap();

    let started = Instant::now();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_flowshare"))
        .args(["ea", "--input"])
        .arg(&input)
        .output()
        .expect("run ea");
    let elapsed = started.elapsed();
    assert!(
        output.status.success(),
        "ea failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(
        elapsed < Duration::from_secs(10),
        "ea took {elapsed:?}, budget is 10s"
    );
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["payments"].as_object().unwrap().len(), 50);
    assert!(report["checks"]["spread_equals_min_deviation"].as_bool().unwrap());
    std::fs::remove_dir_all(&dir).ok();
    println!("ACCEPTANCE 8 (performance): PASS ({elapsed:?})");
}
