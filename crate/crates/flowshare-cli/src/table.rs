//! Plain-text rendering of the report documents.

use crate::selftest::CheckResult;
use flowshare::report::{CoreCheckReport, CoreDoc, EaReport, MinDeviationReport, OracleReport, SolveReport};
use std::collections::BTreeMap;
use std::fmt::Write;

fn payments_block(out: &mut String, payments: &BTreeMap<String, String>) {
    let width = payments.keys().map(String::len).max().unwrap_or(0);
    for (player, value) in payments {
        writeln!(out, "  {player:<width$}  {value}").unwrap();
    }
}

fn core_block(out: &mut String, core: &CoreDoc) {
    let flag = |b: bool| if b { "ok" } else { "VIOLATED" };
    writeln!(
        out,
        "core ({}): ir {}  bb {}  eff {}  cr {}",
        core.mode,
        flag(core.ir),
        flag(core.bb),
        flag(core.eff),
        flag(core.cr)
    )
    .unwrap();
    for v in &core.violations {
        writeln!(
            out,
            "  coalition {{{}}}: value {} but paid {}",
            v.coalition.join(", "),
            v.value,
            v.payment
        )
        .unwrap();
    }
}

fn warnings_block(out: &mut String, warnings: &[String]) {
    for w in warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
}

pub fn solve_table(report: &SolveReport) -> String {
    let mut out = String::new();
    writeln!(out, "total profit: {}", report.total_profit).unwrap();
    for t in &report.trades {
        writeln!(
            out,
            "  {} -> {}  amount {}  profit {}  path {:?}",
            t.seller, t.buyer, t.amount, t.profit, t.path
        )
        .unwrap();
    }
    warnings_block(&mut out, &report.warnings);
    out
}

pub fn ea_table(report: &EaReport) -> String {
    let mut out = String::new();
    writeln!(out, "egalitarian allocation:").unwrap();
    payments_block(&mut out, &report.payments);
    writeln!(out, "trace:").unwrap();
    for (i, step) in report.trace.iter().enumerate() {
        writeln!(
            out,
            "  round {}: bound {}  fixed {{{}}}",
            i + 1,
            step.lambda,
            step.fixed.join(", ")
        )
        .unwrap();
    }
    core_block(&mut out, &report.checks.core);
    match report.checks.oracle_match {
        Some(true) => writeln!(out, "oracle: exact match").unwrap(),
        Some(false) => writeln!(out, "oracle: MISMATCH").unwrap(),
        None => writeln!(out, "oracle: skipped (too many players)").unwrap(),
    }
    writeln!(
        out,
        "spread: {}  min deviation: {}  equal: {}",
        report.checks.spread,
        report.checks.min_deviation,
        report.checks.spread_equals_min_deviation
    )
    .unwrap();
    warnings_block(&mut out, &report.warnings);
    out
}

pub fn core_check_table(report: &CoreCheckReport) -> String {
    let mut out = String::new();
    writeln!(out, "payments:").unwrap();
    payments_block(&mut out, &report.payments);
    core_block(&mut out, &report.core);
    out
}

pub fn min_deviation_table(report: &MinDeviationReport) -> String {
    let mut out = String::new();
    writeln!(out, "minimum deviation: {}", report.delta).unwrap();
    writeln!(out, "witness payments:").unwrap();
    payments_block(&mut out, &report.witness);
    out
}

pub fn oracle_table(report: &OracleReport) -> String {
    let mut out = String::new();
    writeln!(out, "oracle allocation:").unwrap();
    payments_block(&mut out, &report.payments);
    out
}

pub fn selftest_table(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        match &r.detail {
            Some(detail) => writeln!(out, "FAIL  {}  ({detail})", r.name).unwrap(),
            None => writeln!(out, "ok    {}", r.name).unwrap(),
        }
    }
    let failed = results.iter().filter(|r| !r.ok).count();
    writeln!(out, "{} checks, {} failed", results.len(), failed).unwrap();
    out
}
