//! Profit sharing for exchange flow games.
//!
//! Given a capacitated exchange network whose edges carry per-unit profits,
//! this crate solves the optimal trade flow, builds the associated
//! profit-sharing network, and computes payment vectors for the players:
//! arbitrary core payments from maximum flows, and the egalitarian
//! allocation via an iterative equal-flow fixing loop. Everything runs on
//! exact rational arithmetic, so core membership and equal-share thresholds
//! are decided exactly rather than within a float tolerance.
//!
//! Module map:
//!
//! - [`rat`]: the exact scalar type used everywhere.
//! - [`flow`]: graph/network primitives and flow solvers (maximum flow,
//!   circulations with lower bounds, maximum-profit flow, path
//!   decomposition, rational recovery from binary search).
//! - [`exchange`]: exchange instances, trade solutions, and the induced
//!   coalition game.
//! - [`sharing`]: the profit-sharing graph, payment extraction, and core
//!   checks.
//! - [`aemf`]: equal / almost-equal maximum-flow machinery (common
//!   lower-bound maximization, window feasibility, minimum deviation).
//! - [`egalitarian`]: the egalitarian allocation, its brute-force oracle,
//!   and leximin utilities.
//! - [`gen`]: seeded random instance generation.
//! - [`report`]: machine-readable report documents and the end-to-end
//!   analysis pipeline used by the CLI.

pub mod aemf;
pub mod egalitarian;
pub mod exchange;
pub mod fixtures;
pub mod flow;
pub mod gen;
pub mod par;
pub mod rat;
pub mod report;
pub mod sharing;

pub use rat::Rat;
