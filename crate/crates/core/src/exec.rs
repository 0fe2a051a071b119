//! Execution strategy for the enumeration-heavy searches (spark, RIP,
//! sparse recovery, sign-vector maximality).
//!
//! With the `parallel` feature enabled, [`ExecMode::Parallel`] fans work out
//! over rayon; without it every mode runs sequentially. Results never depend
//! on the schedule: searches report the first hit in enumeration order.

use std::env;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default cap on the number of subsets a single spark or RIP search may visit.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "STPCS_BUDGET";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: u64,
    pub mode: ExecMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            mode: ExecMode::default(),
        }
    }
}

impl SearchConfig {
    pub fn sequential() -> Self {
        Self {
            mode: ExecMode::Sequential,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_mode(mut self, mode: ExecMode) -> Self {
        self.mode = mode;
        self
    }

    /// Default config with the budget taken from `STPCS_BUDGET` when it parses.
    pub fn from_env() -> Self {
        let budget = env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Self::default().with_budget(budget)
    }
}

pub(crate) fn map_collect<T, U, F>(items: &[T], mode: ExecMode, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// First item (in slice order) for which `f` returns `Some`.
pub(crate) fn find_map_first<T, U, F>(items: &[T], mode: ExecMode, f: F) -> Option<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return items.par_iter().find_map_first(f);
    }
    let _ = mode;
    items.iter().find_map(f)
}

/// Every `f(i)` that is `Some` over `0..n`, in index order.
pub(crate) fn filter_map_range<U, F>(n: u64, mode: ExecMode, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().filter_map(f).collect();
    }
    let _ = mode;
    (0..n).filter_map(f).collect()
}
