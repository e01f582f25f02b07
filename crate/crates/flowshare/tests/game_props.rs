//! Game-level invariants: coalition structure, core membership of maximum
//! flows, threshold exactness, and allocation properties, across fixtures
//! and seeded random instances.

use flowshare::aemf::{
    check_aemf_feasible, common_lower_bound_feasible, deviation_feasible, max_common_lower_bound,
    HomologousSet, PinnedState,
};
use flowshare::egalitarian::{
    dutta_ray, egalitarian_allocation, egalitarian_allocation_with, fixedness_cross_check,
    leximin_compare, spread, LeximinOrder, SolveOptions,
};
use flowshare::exchange::{
    build_game, coalition_value, solve_exchange, validate_instance, ExchangeInstance, PlayerId,
};
use flowshare::fixtures;
use flowshare::flow::{max_flow, max_flow_with_order, AugmentOrder, Bound};
use flowshare::gen::corpus_instance;
use flowshare::rat::Rat;
use flowshare::sharing::{
    build_profit_sharing_graph, check_core, extract_payments, CheckMode, PaymentVector,
};
use std::collections::BTreeSet;

fn corpus(count: u64, max_players: usize, max_trades: usize) -> Vec<ExchangeInstance> {
    (0..count)
        .map(|seed| validate_instance(&corpus_instance(seed, max_players, max_trades)).unwrap())
        .collect()
}

#[test]
fn grand_coalition_value_is_total_profit() {
    for inst in corpus(60, 10, 12).iter().chain(fixtures::all().iter().map(|(_, i)| i)) {
        let sol = solve_exchange(inst).unwrap();
        let game = build_game(&sol).unwrap();
        assert_eq!(game.grand_value(), sol.total_profit);
    }
}

#[test]
fn coalition_value_monotone_and_superadditive() {
    for inst in corpus(40, 8, 10) {
        let sol = solve_exchange(&inst).unwrap();
        let game = build_game(&sol).unwrap();
        let full = game.full_mask();
        for mask in 0..=full {
            let v = game.value_mask(mask);
            // Monotone: adding any one player never lowers the value.
            for i in 0..game.player_count() {
                if mask & (1 << i) == 0 {
                    assert!(game.value_mask(mask | (1 << i)) >= v);
                }
            }
        }
        // Superadditive on disjoint pairs.
        for s in 0..=full {
            let rest = full & !s;
            let mut t = rest;
            loop {
                let union = game.value_mask(s | t);
                assert!(game.value_mask(s) + game.value_mask(t) <= union);
                if t == 0 {
                    break;
                }
                t = (t - 1) & rest;
            }
        }
    }
}

#[test]
fn coalition_value_matches_game_table() {
    for (_, inst) in fixtures::all() {
        let sol = solve_exchange(&inst).unwrap();
        let game = build_game(&sol).unwrap();
        for mask in 0..=game.full_mask() {
            let set: BTreeSet<PlayerId> = game.mask_players(mask).into_iter().collect();
            assert_eq!(coalition_value(&sol, &set).unwrap(), game.value_mask(mask));
        }
    }
}

/// Core-elements theorem: payments read off any maximum flow of the sharing
/// graph pass all four checks exhaustively.
#[test]
fn maximum_flows_pay_core_vectors() {
    let mut instances = corpus(60, 10, 12);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    for (idx, inst) in instances.iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let game = build_game(&sol).unwrap();
        for seed in 0..12 {
            let order = AugmentOrder::seeded(seed, psg.network().edge_count());
            let flow = max_flow_with_order(psg.network(), &order).unwrap();
            assert_eq!(flow.value(), psg.total_profit(), "instance {idx}");
            let payments = extract_payments(&psg, &flow);
            let report = check_core(&payments, &game, CheckMode::Exhaustive).unwrap();
            assert!(
                report.in_core() && report.bb_ok,
                "instance {idx} seed {seed}: {report:?}"
            );
        }
    }
}

/// Every source edge is saturated in any maximum flow of the sharing graph.
#[test]
fn source_edges_saturate() {
    for (name, inst) in fixtures::all() {
        let sol = solve_exchange(&inst).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        for seed in 0..8 {
            let order = AugmentOrder::seeded(seed, psg.network().edge_count());
            let flow = max_flow_with_order(psg.network(), &order).unwrap();
            for (i, &e) in psg.source_edges().iter().enumerate() {
                assert_eq!(
                    flow.edge_value(e),
                    &psg.trade_profits()[i],
                    "fixture {name} seed {seed}"
                );
            }
        }
    }
}

/// The mechanism behind coalitional rationality, asserted without the core
/// checker: a coalition's payments absorb at least its internal trades.
#[test]
fn internal_profit_lower_bound() {
    for inst in corpus(40, 8, 10) {
        let sol = solve_exchange(&inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let flow = max_flow(psg.network()).unwrap();
        let payments = extract_payments(&psg, &flow);
        let n = sol.players.len();
        for mask in 0u32..(1 << n) {
            let coalition: BTreeSet<PlayerId> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| sol.players[i].clone())
                .collect();
            let internal: Rat = sol
                .trades
                .iter()
                .filter(|t| coalition.contains(&t.seller) && coalition.contains(&t.buyer))
                .map(|t| &t.profit)
                .sum();
            let paid: Rat = coalition
                .iter()
                .map(|p| payments.get(p).unwrap())
                .sum();
            assert!(paid >= internal);
        }
    }
}

/// The common lower bound is an exact threshold: feasible at the value,
/// infeasible any positive amount above it.
#[test]
fn lambda_is_exact_threshold() {
    for inst in corpus(30, 8, 10) {
        let sol = solve_exchange(&inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let state = PinnedState::all_free(&psg);
        let (lambda, witness) = max_common_lower_bound(&psg, &state).unwrap();
        witness.validate(psg.network()).unwrap();
        assert!(common_lower_bound_feasible(&psg, &state, &lambda).unwrap());
        let bound = flowshare::aemf::lambda_denominator_bound(&psg);
        let eps = Rat::from_big(1.into(), num_bigint::BigInt::from(2) * &bound * &bound);
        assert!(!common_lower_bound_feasible(&psg, &state, &(&lambda + &eps)).unwrap());
    }
}

/// For a fixed width, the set of feasible window bases is an interval.
#[test]
fn window_base_region_is_an_interval() {
    for (name, inst) in fixtures::all() {
        let sol = solve_exchange(&inst).unwrap();
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let h: BTreeSet<_> = psg.payment_edges().iter().copied().collect();
        let (delta, witness) = flowshare::aemf::min_deviation(&psg, &h).unwrap();
        let width = &delta + &Rat::one();
        let payments = extract_payments(&psg, &witness);
        let base_hint = payments.sorted_values()[0].clone();
        let probe = |l: &Rat| {
            let set = HomologousSet {
                edges: h.clone(),
                deviation: Bound::Finite(width.clone()),
            };
            check_aemf_feasible(
                psg.network(),
                &[set],
                std::slice::from_ref(l),
                psg.total_profit().clone(),
            )
            .is_ok()
        };
        // Sample a ladder of bases around a known-feasible one; feasibility
        // must be contiguous.
        let step = Rat::new(1, 3);
        let lo = &base_hint - &(&step * &Rat::from_int(6));
        let ladder: Vec<(Rat, bool)> = (0..13)
            .map(|i| {
                let l = &lo + &(&step * &Rat::from_int(i));
                let l = if l.is_negative() { Rat::zero() } else { l };
                let ok = probe(&l);
                (l, ok)
            })
            .collect();
        let first = ladder.iter().position(|(_, ok)| *ok);
        let last = ladder.iter().rposition(|(_, ok)| *ok);
        if let (Some(a), Some(b)) = (first, last) {
            for (l, ok) in &ladder[a..=b] {
                assert!(*ok, "fixture {name}: gap at base {l}");
            }
        }
    }
}

/// Fixedness via residual reachability agrees with re-maximizing each
/// payment edge.
#[test]
fn fixedness_agrees_with_edge_objective() {
    for (name, inst) in fixtures::all() {
        fixedness_cross_check(&inst).expect(name);
    }
    for inst in corpus(20, 6, 8) {
        fixedness_cross_check(&inst).unwrap();
    }
}

#[test]
fn allocation_equals_oracle_on_corpus() {
    for (idx, inst) in corpus(60, 8, 10).iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        let game = build_game(&sol).unwrap();
        let oracle = dutta_ray(&game).unwrap();
        let ea = egalitarian_allocation(inst).unwrap();
        assert_eq!(oracle, ea.payments, "instance {idx}");
    }
}

#[test]
fn allocation_is_order_invariant() {
    for inst in corpus(12, 8, 10) {
        let base = egalitarian_allocation(&inst).unwrap();
        for seed in 0..10 {
            let opts = SolveOptions::seeded(seed, 64);
            let run = egalitarian_allocation_with(&inst, &opts).unwrap();
            assert_eq!(run.payments, base.payments);
        }
    }
}

#[test]
fn allocation_trace_and_efficiency() {
    for inst in corpus(40, 10, 12) {
        let sol = solve_exchange(&inst).unwrap();
        let ea = egalitarian_allocation(&inst).unwrap();
        assert!(ea.trace.len() <= inst.players().len());
        assert_eq!(ea.payments.total(), sol.total_profit);
        assert!(ea.payments.iter().all(|(_, v)| !v.is_negative()));
        for w in ea.trace.windows(2) {
            assert!(w[0].lambda < w[1].lambda);
        }
        let fixed: usize = ea.trace.iter().map(|r| r.newly_fixed.len()).sum();
        if sol.total_profit.is_positive() {
            assert_eq!(fixed, inst.players().len());
        }
    }
}

#[test]
fn allocation_leximin_dominates_sampled_core_vectors() {
    for (idx, inst) in corpus(25, 8, 10).iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let ea = egalitarian_allocation(inst).unwrap();
        for seed in 0..25 {
            let order = AugmentOrder::seeded(seed, psg.network().edge_count());
            let flow = max_flow_with_order(psg.network(), &order).unwrap();
            let sample = extract_payments(&psg, &flow);
            let cmp = leximin_compare(&ea.payments, &sample).unwrap();
            assert!(
                matches!(cmp, LeximinOrder::Greater | LeximinOrder::Equal),
                "instance {idx} seed {seed}"
            );
        }
    }
}

/// Exhaustive integral core enumeration on the chain fixture: the
/// allocation leximin-dominates every integral core vector.
#[test]
fn allocation_dominates_every_integral_core_vector() {
    let inst = fixtures::e1();
    let sol = solve_exchange(&inst).unwrap();
    let game = build_game(&sol).unwrap();
    let ea = egalitarian_allocation(&inst).unwrap();
    let c: i64 = 8;
    let mut checked = 0;
    for a in 0..=c {
        for b in 0..=(c - a) {
            let ch = c - a - b;
            let candidate = PaymentVector::from_pairs([
                (PlayerId::from("A"), Rat::from_int(a)),
                (PlayerId::from("B"), Rat::from_int(b)),
                (PlayerId::from("C"), Rat::from_int(ch)),
            ]);
            let report = check_core(&candidate, &game, CheckMode::Exhaustive).unwrap();
            if report.in_core() {
                checked += 1;
                let cmp = leximin_compare(&ea.payments, &candidate).unwrap();
                assert!(matches!(cmp, LeximinOrder::Greater | LeximinOrder::Equal));
            }
        }
    }
    assert!(checked > 3, "core enumeration degenerate");
}

#[test]
fn spread_equals_min_deviation_on_corpus() {
    let mut instances = corpus(40, 10, 12);
    instances.extend(fixtures::all().into_iter().map(|(_, i)| i));
    for (idx, inst) in instances.iter().enumerate() {
        let sol = solve_exchange(inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let h: BTreeSet<_> = psg.payment_edges().iter().copied().collect();
        let ea = egalitarian_allocation(inst).unwrap();
        let (delta, _) = flowshare::aemf::min_deviation(&psg, &h).unwrap();
        assert_eq!(spread(&ea.payments), delta, "instance {idx}");
    }
}

#[test]
fn min_deviation_is_tight_on_corpus() {
    for inst in corpus(15, 8, 8) {
        let sol = solve_exchange(&inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let h: BTreeSet<_> = psg.payment_edges().iter().copied().collect();
        let (delta, _) = flowshare::aemf::min_deviation(&psg, &h).unwrap();
        assert!(deviation_feasible(&psg, &h, &delta).unwrap().is_some());
        if !delta.is_zero() {
            let bound = flowshare::aemf::lambda_denominator_bound(&psg);
            let eps = Rat::from_big(1.into(), num_bigint::BigInt::from(2) * &bound * &bound);
            assert!(deviation_feasible(&psg, &h, &(&delta - &eps)).unwrap().is_none());
        }
    }
}

/// The two independent search routes agree on the corpus.
#[test]
fn newton_and_bisection_agree_on_corpus() {
    for inst in corpus(10, 6, 8) {
        let sol = solve_exchange(&inst).unwrap();
        if !sol.total_profit.is_positive() {
            continue;
        }
        let psg = build_profit_sharing_graph(&sol).unwrap();
        let bound = flowshare::aemf::lambda_denominator_bound(&psg);
        let state = PinnedState::all_free(&psg);
        let (newton, _) = max_common_lower_bound(&psg, &state).unwrap();
        assert_eq!(
            newton,
            flowshare::aemf::max_common_lower_bound_bisect(&psg, &state, &bound).unwrap()
        );
        let h: BTreeSet<_> = psg.payment_edges().iter().copied().collect();
        let (delta, _) = flowshare::aemf::min_deviation(&psg, &h).unwrap();
        assert_eq!(
            delta,
            flowshare::aemf::min_deviation_bisect(&psg, &h, &bound).unwrap()
        );
    }
}
