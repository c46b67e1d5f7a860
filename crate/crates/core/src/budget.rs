//! Enumeration caps shared by the exhaustive checks.

/// Default cap on the number of subspaces a single scan may visit.
pub const DEFAULT_SUBSPACE_BUDGET: u128 = 10_000_000;

/// Default cap on messages scanned by a distance computation.
pub const DEFAULT_MESSAGE_BUDGET: u128 = 1 << 24;

pub const BUDGET_ENV: &str = "CODE_FORGE_BUDGET";

/// Subspace cap, taken from `CODE_FORGE_BUDGET` when it parses.
pub fn subspace_budget() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SUBSPACE_BUDGET)
}
