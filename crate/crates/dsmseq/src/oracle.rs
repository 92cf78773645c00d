//! Exact optimum by branch and bound over permutation prefixes.
//!
//! Appending node v to a prefix adds one feedback mark per already-placed
//! dependent of v, so partial costs grow monotonically and any branch whose
//! partial cost reaches the incumbent can be cut. Intended for small cases;
//! refuses anything above `node_limit`.

use thiserror::Error;

use crate::case::DsmCase;
use crate::eval::{sequence_from_perm, Evaluator, Sequence};

pub const DEFAULT_NODE_LIMIT: usize = 10;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("case has {n} nodes, above the exhaustive-search limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Minimum feedback count and the first order attaining it (first in the
/// depth-first order over node indices, so the result is deterministic).
pub fn brute_force_optimum(
    case: &DsmCase,
    node_limit: usize,
) -> Result<(Sequence, u32), OracleError> {
    let n = case.node_count();
    if n > node_limit || n > 64 {
        return Err(OracleError::TooLarge {
            n,
            limit: node_limit.min(64),
        });
    }
    let eval = Evaluator::new(case);
    // dependents_of[v] = bitmask of nodes depending on v
    let mut dependents_of = vec![0u64; n];
    for edge in &case.edges {
        let dep = case.index_of(&edge.dependent).expect("validated") as u64;
        let pre = case.index_of(&edge.predecessor).expect("validated");
        dependents_of[pre] |= 1u64 << dep;
    }

    struct Search<'a> {
        n: usize,
        dependents_of: &'a [u64],
        prefix: Vec<u32>,
        best_perm: Vec<u32>,
        best_score: u32,
    }

    impl Search<'_> {
        fn dfs(&mut self, placed: u64, cost: u32) {
            if cost >= self.best_score {
                return;
            }
            if self.prefix.len() == self.n {
                self.best_score = cost;
                self.best_perm = self.prefix.clone();
                return;
            }
            for v in 0..self.n {
                if placed & (1 << v) != 0 {
                    continue;
                }
                let added = (placed & self.dependents_of[v]).count_ones();
                self.prefix.push(v as u32);
                self.dfs(placed | (1 << v), cost + added);
                self.prefix.pop();
            }
        }
    }

    let mut search = Search {
        n,
        dependents_of: &dependents_of,
        prefix: Vec::with_capacity(n),
        best_perm: Vec::new(),
        best_score: u32::MAX,
    };
    search.dfs(0, 0);

    debug_assert_eq!(eval.score_perm(&search.best_perm), search.best_score);
    Ok((
        sequence_from_perm(case, &search.best_perm),
        search.best_score,
    ))
}
