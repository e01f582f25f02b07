//! Built-in fixture assertions, runnable in the field without the test
//! harness.

use flowshare::aemf::{min_deviation, PinnedState};
use flowshare::egalitarian::{dutta_ray, egalitarian_allocation, spread};
use flowshare::exchange::{build_game, solve_exchange, ExchangeInstance, PlayerId};
use flowshare::par::{self, ExecMode};
use flowshare::rat::Rat;
use flowshare::report::run_ea_analysis;
use flowshare::sharing::{build_profit_sharing_graph, check_core, extract_payments, CheckMode};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn check(name: &str, run: impl FnOnce() -> Result<(), String>) -> CheckResult {
    match run() {
        Ok(()) => CheckResult {
            name: name.to_string(),
            ok: true,
            detail: None,
        },
        Err(detail) => CheckResult {
            name: name.to_string(),
            ok: false,
            detail: Some(detail),
        },
    }
}

fn expect_payments(inst: &ExchangeInstance, expect: &[(&str, Rat)]) -> Result<(), String> {
    let ea = egalitarian_allocation(inst).map_err(|e| e.to_string())?;
    for (player, value) in expect {
        let got = ea
            .payments
            .get(&PlayerId::from(*player))
            .ok_or_else(|| format!("missing player {player}"))?;
        if got != value {
            return Err(format!("player {player}: expected {value}, got {got}"));
        }
    }
    Ok(())
}

fn expect_min_deviation(inst: &ExchangeInstance, expect: Rat) -> Result<(), String> {
    let sol = solve_exchange(inst).map_err(|e| e.to_string())?;
    let psg = build_profit_sharing_graph(&sol).map_err(|e| e.to_string())?;
    let windowed = psg.payment_edges().iter().copied().collect();
    let (delta, _) = min_deviation(&psg, &windowed).map_err(|e| e.to_string())?;
    if delta != expect {
        return Err(format!("expected {expect}, got {delta}"));
    }
    let ea = egalitarian_allocation(inst).map_err(|e| e.to_string())?;
    let s = spread(&ea.payments);
    if s != delta {
        return Err(format!("allocation spread {s} differs from deviation {delta}"));
    }
    Ok(())
}

fn fixture_checks(name: &str, inst: ExchangeInstance) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check(&format!("{name}: allocation matches oracle"), || {
        let sol = solve_exchange(&inst).map_err(|e| e.to_string())?;
        let game = build_game(&sol).map_err(|e| e.to_string())?;
        let oracle = dutta_ray(&game).map_err(|e| e.to_string())?;
        let ea = egalitarian_allocation(&inst).map_err(|e| e.to_string())?;
        if oracle == ea.payments {
            Ok(())
        } else {
            Err("oracle and flow allocation differ".to_string())
        }
    }));
    out.push(check(&format!("{name}: maximum flow pays a core vector"), || {
        let sol = solve_exchange(&inst).map_err(|e| e.to_string())?;
        let psg = build_profit_sharing_graph(&sol).map_err(|e| e.to_string())?;
        let flow = flowshare::flow::max_flow(psg.network()).map_err(|e| e.to_string())?;
        let payments = extract_payments(&psg, &flow);
        let game = build_game(&sol).map_err(|e| e.to_string())?;
        let report =
            check_core(&payments, &game, CheckMode::Exhaustive).map_err(|e| e.to_string())?;
        if report.in_core() && report.bb_ok {
            Ok(())
        } else {
            Err(format!("core check failed: {report:?}"))
        }
    }));
    out.push(check(&format!("{name}: common bound is exact"), || {
        let sol = solve_exchange(&inst).map_err(|e| e.to_string())?;
        let psg = build_profit_sharing_graph(&sol).map_err(|e| e.to_string())?;
        let state = PinnedState::all_free(&psg);
        let (lambda, _) =
            flowshare::aemf::max_common_lower_bound(&psg, &state).map_err(|e| e.to_string())?;
        let bound = flowshare::aemf::lambda_denominator_bound(&psg);
        let bisect = flowshare::aemf::max_common_lower_bound_bisect(&psg, &state, &bound)
            .map_err(|e| e.to_string())?;
        if lambda == bisect {
            Ok(())
        } else {
            Err(format!("newton {lambda} != bisect {bisect}"))
        }
    }));
    out
}

/// Runs every fixture assertion, fanning fixtures out over the available
/// parallelism.
pub fn run() -> Vec<CheckResult> {
    let mut results: Vec<CheckResult> = par::run_map(
        ExecMode::default(),
        flowshare::fixtures::all(),
        |(name, inst)| fixture_checks(name, inst),
    )
    .into_iter()
    .flatten()
    .collect();

    results.push(check("E2: allocation is (4, 4)", || {
        expect_payments(
            &flowshare::fixtures::e2(),
            &[("A", Rat::from_int(4)), ("B", Rat::from_int(4))],
        )
    }));
    results.push(check("E1: allocation is (3, 3, 2)", || {
        expect_payments(
            &flowshare::fixtures::e1(),
            &[
                ("A", Rat::from_int(3)),
                ("B", Rat::from_int(3)),
                ("C", Rat::from_int(2)),
            ],
        )
    }));
    results.push(check("E3: allocation is (5, 5, 1, 1)", || {
        expect_payments(
            &flowshare::fixtures::e3(),
            &[
                ("A", Rat::from_int(5)),
                ("B", Rat::from_int(5)),
                ("C", Rat::one()),
                ("D", Rat::one()),
            ],
        )
    }));
    results.push(check("F1: allocation is (1/2..2) by pair", || {
        expect_payments(
            &flowshare::fixtures::f1(),
            &[
                ("s1", Rat::new(1, 2)),
                ("d1", Rat::new(1, 2)),
                ("s2", Rat::one()),
                ("d2", Rat::one()),
                ("s3", Rat::new(3, 2)),
                ("d3", Rat::new(3, 2)),
                ("s4", Rat::from_int(2)),
                ("d4", Rat::from_int(2)),
            ],
        )
    }));
    results.push(check("E2: minimum deviation 0", || {
        expect_min_deviation(&flowshare::fixtures::e2(), Rat::zero())
    }));
    results.push(check("E1: minimum deviation 1", || {
        expect_min_deviation(&flowshare::fixtures::e1(), Rat::one())
    }));
    results.push(check("E3: minimum deviation 4", || {
        expect_min_deviation(&flowshare::fixtures::e3(), Rat::from_int(4))
    }));
    results.push(check("F1: minimum deviation 3/2", || {
        expect_min_deviation(&flowshare::fixtures::f1(), Rat::new(3, 2))
    }));
    results.push(check("E1: trace raises the bound from 2 to 3", || {
        let ea = egalitarian_allocation(&flowshare::fixtures::e1()).map_err(|e| e.to_string())?;
        let lambdas: Vec<String> = ea.trace.iter().map(|r| r.lambda.to_string()).collect();
        if lambdas == ["2", "3"] {
            Ok(())
        } else {
            Err(format!("trace {lambdas:?}"))
        }
    }));
    results.push(check("generated instances analyze cleanly", || {
        for seed in 0..20 {
            let doc = flowshare::gen::corpus_instance(seed, 8, 10);
            let inst =
                flowshare::exchange::validate_instance(&doc).map_err(|e| e.to_string())?;
            run_ea_analysis(&inst, &Default::default(), seed).map_err(|e| e.to_string())?;
        }
        Ok(())
    }));
    results
}
