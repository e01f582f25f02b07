//! Machine-readable report documents and the end-to-end analysis pipeline.
//!
//! Every rational is serialized as a decimal string when integral and as
//! `"p/q"` otherwise; no floating point appears in any report. Maps are
//! ordered, so a report is byte-identical across runs for the same input,
//! seed, and format.

use crate::aemf::{min_deviation, AemfError};
use crate::egalitarian::{
    dutta_ray, egalitarian_allocation_with, spread, EgalError, SolveOptions, MAX_ORACLE_PLAYERS,
};
use crate::exchange::{
    build_game, solve_exchange, CoalitionGame, ExchangeError, ExchangeInstance, PlayerId,
    TradeSolution, MAX_TABLE_PLAYERS,
};
use crate::rat::Rat;
use crate::sharing::{
    build_profit_sharing_graph, check_core, CheckMode, CoreReport, CoreViolation, PaymentVector,
    SharingError,
};
use serde::Serialize;
use std::collections::BTreeMap;

/// Players allowing an exhaustive in-report oracle comparison.
pub const MAX_REPORT_ORACLE_PLAYERS: usize = 12;

/// Coalition sample size used when the player count rules out exhaustive
/// checking.
pub const SAMPLED_CHECK_COUNT: usize = 2000;

fn payments_doc(p: &PaymentVector) -> BTreeMap<String, String> {
    p.iter()
        .map(|(player, value)| (player.0.clone(), value.to_string()))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TradeDoc {
    pub seller: String,
    pub buyer: String,
    pub amount: String,
    pub profit: String,
    pub path: Vec<u32>,
}

/// Report of `solve`: the optimal trades and the total generated profit.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub total_profit: String,
    pub trades: Vec<TradeDoc>,
    pub warnings: Vec<String>,
}

pub fn solve_report(sol: &TradeSolution) -> SolveReport {
    SolveReport {
        total_profit: sol.total_profit.to_string(),
        trades: sol
            .trades
            .iter()
            .map(|t| TradeDoc {
                seller: t.seller.0.clone(),
                buyer: t.buyer.0.clone(),
                amount: t.amount.to_string(),
                profit: t.profit.to_string(),
                path: t.path_edges.iter().map(|e| e.0).collect(),
            })
            .collect(),
        warnings: solution_warnings(sol),
    }
}

fn solution_warnings(sol: &TradeSolution) -> Vec<String> {
    if sol.ambiguous_decomposition {
        vec![
            "support admits multiple two-contract pairings; the deterministic \
             lowest-edge-id decomposition was used"
                .to_string(),
        ]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoreViolationDoc {
    pub coalition: Vec<String>,
    pub value: String,
    pub payment: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoreDoc {
    pub ir: bool,
    pub bb: bool,
    pub eff: bool,
    pub cr: bool,
    pub violations: Vec<CoreViolationDoc>,
    pub mode: String,
}

pub fn core_doc(report: &CoreReport) -> CoreDoc {
    CoreDoc {
        ir: report.ir_ok,
        bb: report.bb_ok,
        eff: report.eff_ok,
        cr: report.cr_ok,
        violations: report
            .violated_coalitions
            .iter()
            .map(|v: &CoreViolation| CoreViolationDoc {
                coalition: v.coalition.iter().map(|p| p.0.clone()).collect(),
                value: v.value.to_string(),
                payment: v.payment.to_string(),
            })
            .collect(),
        mode: match &report.mode {
            CheckMode::Exhaustive => "exhaustive".to_string(),
            CheckMode::Sampled { seed, count } => format!("sampled(seed={seed},count={count})"),
        },
    }
}

/// Report of `core-check`: a payment vector against the induced game.
#[derive(Debug, Clone, Serialize)]
pub struct CoreCheckReport {
    pub payments: BTreeMap<String, String>,
    pub core: CoreDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceDoc {
    pub lambda: String,
    pub fixed: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChecksDoc {
    pub core: CoreDoc,
    /// Exact agreement with the enumeration oracle; absent when the player
    /// count makes enumeration unreasonable.
    pub oracle_match: Option<bool>,
    pub spread: String,
    pub min_deviation: String,
    pub spread_equals_min_deviation: bool,
}

/// Report of `ea`: the egalitarian allocation with its trace and checks.
#[derive(Debug, Clone, Serialize)]
pub struct EaReport {
    pub payments: BTreeMap<String, String>,
    pub trace: Vec<TraceDoc>,
    pub checks: ChecksDoc,
    pub warnings: Vec<String>,
}

/// Report of `min-deviation`.
#[derive(Debug, Clone, Serialize)]
pub struct MinDeviationReport {
    pub delta: String,
    pub witness: BTreeMap<String, String>,
}

/// Report of `oracle`.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub payments: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error(transparent)]
    Sharing(#[from] SharingError),
    #[error(transparent)]
    Aemf(#[from] AemfError),
    #[error(transparent)]
    Egalitarian(#[from] EgalError),
}

impl PipelineError {
    /// True when the failure indicates a broken internal invariant rather
    /// than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            PipelineError::Aemf(AemfError::InfeasiblePinned(_))
                | PipelineError::Egalitarian(EgalError::Stalled(_))
                | PipelineError::Egalitarian(EgalError::Aemf(AemfError::InfeasiblePinned(_)))
        )
    }
}

fn game_for(sol: &TradeSolution) -> Result<CoalitionGame, ExchangeError> {
    if sol.players.len() <= MAX_TABLE_PLAYERS {
        build_game(sol)
    } else {
        Ok(CoalitionGame::lazy(sol))
    }
}

fn check_mode_for(players: usize, seed: u64) -> CheckMode {
    if players <= crate::sharing::MAX_EXHAUSTIVE_PLAYERS {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled {
            seed,
            count: SAMPLED_CHECK_COUNT,
        }
    }
}

/// Runs `solve` and checks a supplied payment vector against the game.
pub fn run_core_check(
    inst: &ExchangeInstance,
    payments: &PaymentVector,
    seed: u64,
) -> Result<CoreCheckReport, PipelineError> {
    let sol = solve_exchange(inst)?;
    let game = game_for(&sol)?;
    let report = check_core(payments, &game, check_mode_for(sol.players.len(), seed))?;
    Ok(CoreCheckReport {
        payments: payments_doc(payments),
        core: core_doc(&report),
    })
}

/// Runs the whole pipeline behind the `ea` command: allocation, trace,
/// core check, oracle comparison (small instances), spread, and the
/// minimum-deviation cross-check.
pub fn run_ea_analysis(
    inst: &ExchangeInstance,
    opts: &SolveOptions,
    seed: u64,
) -> Result<EaReport, PipelineError> {
    let sol = solve_exchange(inst)?;
    let ea = egalitarian_allocation_with(inst, opts)?;
    let game = game_for(&sol)?;
    let core = check_core(&ea.payments, &game, check_mode_for(sol.players.len(), seed))?;

    let oracle_match = if sol.players.len() <= MAX_REPORT_ORACLE_PLAYERS.min(MAX_ORACLE_PLAYERS) {
        match dutta_ray(&game) {
            Ok(oracle) => Some(oracle == ea.payments),
            Err(EgalError::AmbiguousMaximizer(..)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let ea_spread = spread(&ea.payments);
    let delta = if sol.total_profit.is_positive() {
        let psg = build_profit_sharing_graph(&sol)?;
        let windowed = psg.payment_edges().iter().copied().collect();
        min_deviation(&psg, &windowed)?.0
    } else {
        Rat::zero()
    };

    Ok(EaReport {
        payments: payments_doc(&ea.payments),
        trace: ea
            .trace
            .iter()
            .map(|r| TraceDoc {
                lambda: r.lambda.to_string(),
                fixed: r.newly_fixed.iter().map(|p| p.0.clone()).collect(),
            })
            .collect(),
        checks: ChecksDoc {
            core: core_doc(&core),
            oracle_match,
            spread: ea_spread.to_string(),
            spread_equals_min_deviation: ea_spread == delta,
            min_deviation: delta.to_string(),
        },
        warnings: solution_warnings(&sol),
    })
}

/// Runs `min-deviation`: the smallest payment window width and a witness.
pub fn run_min_deviation(inst: &ExchangeInstance) -> Result<MinDeviationReport, PipelineError> {
    let sol = solve_exchange(inst)?;
    if !sol.total_profit.is_positive() {
        return Ok(MinDeviationReport {
            delta: Rat::zero().to_string(),
            witness: sol
                .players
                .iter()
                .map(|p| (p.0.clone(), Rat::zero().to_string()))
                .collect(),
        });
    }
    let psg = build_profit_sharing_graph(&sol)?;
    let windowed = psg.payment_edges().iter().copied().collect();
    let (delta, witness) = min_deviation(&psg, &windowed)?;
    let payments = crate::sharing::extract_payments(&psg, &witness);
    Ok(MinDeviationReport {
        delta: delta.to_string(),
        witness: payments_doc(&payments),
    })
}

/// Runs `oracle`: the enumeration route to the egalitarian allocation.
pub fn run_oracle(inst: &ExchangeInstance) -> Result<OracleReport, PipelineError> {
    let sol = solve_exchange(inst)?;
    let game = game_for(&sol)?;
    let payments = dutta_ray(&game)?;
    Ok(OracleReport {
        payments: payments_doc(&payments),
    })
}

/// Parses a `--vector` argument of the form `A=8,B=0,C=1/2`.
pub fn parse_vector(text: &str) -> Result<PaymentVector, String> {
    let mut entries = BTreeMap::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (player, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected player=value, got {part:?}"))?;
        let rat: Rat = value
            .trim()
            .parse()
            .map_err(|e| format!("bad value for {player}: {e}"))?;
        if entries
            .insert(PlayerId(player.trim().to_string()), rat)
            .is_some()
        {
            return Err(format!("duplicate player {player}"));
        }
    }
    if entries.is_empty() {
        return Err("empty payment vector".to_string());
    }
    Ok(PaymentVector::new(entries))
}

/// Serializes any report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serialization");
    out.push('\n');
    out
}
