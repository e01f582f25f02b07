//! Data-parallel map helpers.
//!
//! Batch layers (coalition scans, per-edge fixedness tests, corpus runs)
//! funnel through [`run_map`], which dispatches on an [`ExecMode`]. With the
//! `parallel` feature enabled the default mode fans work out over rayon;
//! without it everything is sequential. Results are collected in input
//! order, so outputs are identical across modes and thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for batch work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Maps `f` over `items`, preserving order.
pub fn run_map<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.into_par_iter().map(f).collect(),
    }
}

/// Maps `f` over an index range, preserving order.
pub fn run_map_range<U, F>(mode: ExecMode, range: std::ops::Range<usize>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => range.map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => range.into_par_iter().map(f).collect(),
    }
}
