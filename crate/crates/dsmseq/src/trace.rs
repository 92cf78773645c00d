//! Convergence traces keyed by unique solutions explored.
//!
//! Search methods burn evaluations at wildly different rates, so traces are
//! recorded against the count of *distinct* permutations evaluated so far,
//! not iterations. A point is appended whenever a new unique solution is
//! seen, carrying the best score at that moment.

use std::collections::HashSet;

/// Cut-off used when comparing methods: only the first 10,000 unique
/// solutions of a run are kept.
pub const TRACE_TRUNCATION_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracePoint {
    pub unique_solutions: u64,
    pub best_score: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub method: String,
    pub case: String,
    pub seed: u64,
    pub points: Vec<TracePoint>,
}

impl RunTrace {
    pub fn new(method: impl Into<String>, case: impl Into<String>, seed: u64) -> Self {
        RunTrace {
            method: method.into(),
            case: case.into(),
            seed,
            points: Vec::new(),
        }
    }

    /// Append a point. x must strictly increase and best must never worsen.
    pub fn record(&mut self, unique_solutions: u64, best_score: u32) {
        if let Some(last) = self.points.last() {
            debug_assert!(unique_solutions > last.unique_solutions, "x must advance");
            debug_assert!(best_score <= last.best_score, "best must not regress");
        }
        self.points.push(TracePoint {
            unique_solutions,
            best_score,
        });
    }

    /// Copy with points beyond `limit` unique solutions dropped.
    pub fn truncated(&self, limit: u64) -> RunTrace {
        RunTrace {
            method: self.method.clone(),
            case: self.case.clone(),
            seed: self.seed,
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| p.unique_solutions <= limit)
                .collect(),
        }
    }

    pub fn final_best(&self) -> Option<u32> {
        self.points.last().map(|p| p.best_score)
    }

    /// Best score at or before `x` unique solutions (step function,
    /// last observation carried forward).
    pub fn best_at(&self, x: u64) -> Option<u32> {
        self.points
            .iter()
            .take_while(|p| p.unique_solutions <= x)
            .last()
            .map(|p| p.best_score)
    }
}

/// Free-function form of [`RunTrace::truncated`] with the standard limit as
/// the usual argument.
pub fn truncate_trace(trace: &RunTrace, limit: u64) -> RunTrace {
    trace.truncated(limit)
}

/// Tracks which permutations have been evaluated. Keys are permutations of
/// node indices, so memory stays modest even for long runs.
#[derive(Debug, Default)]
pub struct UniqueCounter {
    seen: HashSet<Vec<u32>>,
}

impl UniqueCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when `perm` has not been seen before.
    pub fn observe(&mut self, perm: &[u32]) -> bool {
        if self.seen.contains(perm) {
            false
        } else {
            self.seen.insert(perm.to_vec());
            true
        }
    }

    pub fn count(&self) -> u64 {
        self.seen.len() as u64
    }
}
