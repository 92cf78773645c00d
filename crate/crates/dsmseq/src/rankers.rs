//! One-shot orderings from network structure.
//!
//! Each method produces a primary/secondary score per node plus sort
//! directions; [`order_from_scores`] turns that into a sequence (stable sort,
//! secondary tie-break, residual ties shuffled under the caller's seed).
//! Directions are fixed so that on a tie-free DAG the order comes out
//! topological: ascending cumulative-dependence row sums, descending
//! dependents-minus-dependencies, ascending dominant-eigenvector component.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::case::DsmCase;
use crate::eval::{AdjacencyMatrix, Sequence};
use crate::matrix::{power_iteration, spectral_radius_estimate, Matrix};

pub const DEFAULT_RESOLVENT_DELTA: f64 = 0.025;
const EXP_TERM_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;
const EIGEN_ITER_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SortDirection {
    Ascending,
    Descending,
}

/// Per-node scores aligned with case declaration order, plus how to sort them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub primary: Vec<f64>,
    pub secondary: Vec<f64>,
    pub primary_dir: SortDirection,
    pub secondary_dir: SortDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    Exponential,
    Resolvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankerKind {
    OutInDegree,
    Eigenvector,
    WalkExponential,
    WalkResolvent,
    Visibility,
}

impl RankerKind {
    pub const ALL: [RankerKind; 5] = [
        RankerKind::OutInDegree,
        RankerKind::Eigenvector,
        RankerKind::WalkExponential,
        RankerKind::WalkResolvent,
        RankerKind::Visibility,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            RankerKind::OutInDegree => "out-in-degree",
            RankerKind::Eigenvector => "eigenvector",
            RankerKind::WalkExponential => "walk-exponential",
            RankerKind::WalkResolvent => "walk-resolvent",
            RankerKind::Visibility => "visibility",
        }
    }
}

#[derive(Debug, Error)]
pub enum RankerError {
    #[error("resolvent delta must be a finite positive number, got {0}")]
    InvalidDelta(f64),
    #[error(
        "resolvent series diverges: delta {delta} * spectral radius {rho:.6} >= 1; \
         lower delta below {bound:.6}"
    )]
    ResolventDiverges { delta: f64, rho: f64, bound: f64 },
}

/// With edges oriented predecessor -> dependent: primary = out-degree minus
/// in-degree (dependents minus dependencies), secondary = out-degree.
pub fn score_out_in_degree(case: &DsmCase) -> ScoreVector {
    let adj = AdjacencyMatrix::from_case(case);
    let n = adj.n();
    // adjacency row i = dependencies of i, column j = dependents of j
    let mut primary = Vec::with_capacity(n);
    let mut secondary = Vec::with_capacity(n);
    for v in 0..n {
        let dependents = adj.col_sum(v) as f64;
        let dependencies = adj.row_sum(v) as f64;
        primary.push(dependents - dependencies);
        secondary.push(dependents);
    }
    ScoreVector {
        primary,
        secondary,
        primary_dir: SortDirection::Descending,
        secondary_dir: SortDirection::Descending,
    }
}

/// Dominant right eigenvector component (unit-sum) as primary, dominant left
/// eigenvector component as secondary. When power iteration collapses
/// (nilpotent adjacency) or fails to settle (e.g. periodic structure), the
/// affected vector is declared a full tie.
pub fn score_eigenvector(case: &DsmCase) -> ScoreVector {
    let a = Matrix::from_adjacency(&AdjacencyMatrix::from_case(case));
    let n = a.n();
    let primary = power_iteration(&a, EIGEN_TOL, EIGEN_ITER_CAP).unwrap_or_else(|| vec![0.0; n]);
    let secondary =
        power_iteration(&a.transpose(), EIGEN_TOL, EIGEN_ITER_CAP).unwrap_or_else(|| vec![0.0; n]);
    ScoreVector {
        primary,
        secondary,
        primary_dir: SortDirection::Ascending,
        secondary_dir: SortDirection::Descending,
    }
}

/// Row sums of F(A) as primary (ascending: fewest cumulative dependencies
/// first), column sums as secondary (descending), where F is either exp(A)
/// or the resolvent (I - delta*A)^(-1).
pub fn score_walk(case: &DsmCase, kind: WalkKind, delta: f64) -> Result<ScoreVector, RankerError> {
    let a = Matrix::from_adjacency(&AdjacencyMatrix::from_case(case));
    let n = a.n();
    let f = match kind {
        WalkKind::Exponential => a.exp(EXP_TERM_TOL),
        WalkKind::Resolvent => {
            if !delta.is_finite() || delta <= 0.0 {
                return Err(RankerError::InvalidDelta(delta));
            }
            let rho = spectral_radius_estimate(&a);
            if delta * rho >= 1.0 {
                return Err(RankerError::ResolventDiverges {
                    delta,
                    rho,
                    bound: 1.0 / rho,
                });
            }
            let mut m = Matrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, m.get(i, j) - delta * a.get(i, j));
                }
            }
            m.inverse().ok_or(RankerError::ResolventDiverges {
                delta,
                rho,
                bound: 1.0 / rho,
            })?
        }
    };
    Ok(ScoreVector {
        primary: (0..n).map(|i| f.row_sum(i)).collect(),
        secondary: (0..n).map(|j| f.col_sum(j)).collect(),
        primary_dir: SortDirection::Ascending,
        secondary_dir: SortDirection::Descending,
    })
}

/// Reachability counts: V(i,j) = 1 iff some walk of length 0..=n goes from i
/// to j (k = 0 contributes the identity). Primary = row sums ascending,
/// secondary = column sums descending.
// index form keeps the closure recurrence readable
#[allow(clippy::needless_range_loop)]
pub fn score_visibility(case: &DsmCase) -> ScoreVector {
    let adj = AdjacencyMatrix::from_case(case);
    let n = adj.n();
    // reflexive-transitive closure; a walk exists iff a path of length < n does
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
        for (j, cell) in row.iter_mut().enumerate() {
            if adj.get(i, j) {
                *cell = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let primary = (0..n)
        .map(|i| reach[i].iter().filter(|&&b| b).count() as f64)
        .collect();
    let secondary = (0..n)
        .map(|j| (0..n).filter(|&i| reach[i][j]).count() as f64)
        .collect();
    ScoreVector {
        primary,
        secondary,
        primary_dir: SortDirection::Ascending,
        secondary_dir: SortDirection::Descending,
    }
}

/// Stable sort by primary score, secondary as tie-break, residual ties
/// permuted uniformly under `seed`. Exact float equality decides ties; score
/// vectors here come from counts and converged iterations, not noisy sums.
pub fn order_from_scores(case: &DsmCase, scores: &ScoreVector, seed: u64) -> Sequence {
    let n = case.node_count();
    assert_eq!(scores.primary.len(), n, "one primary score per node");
    assert_eq!(scores.secondary.len(), n, "one secondary score per node");
    // normalize -0.0 so sign of zero never splits a tie
    let norm = |x: f64| if x == 0.0 { 0.0 } else { x };
    let oriented = |x: f64, dir: SortDirection| match dir {
        SortDirection::Ascending => norm(x),
        SortDirection::Descending => norm(-x),
    };
    let key = |i: usize| {
        (
            oriented(scores.primary[i], scores.primary_dir),
            oriented(scores.secondary[i], scores.secondary_dir),
        )
    };
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let (pa, sa) = key(a);
        let (pb, sb) = key(b);
        pa.total_cmp(&pb).then(sa.total_cmp(&sb))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && key(idx[end]) == key(idx[start]) {
            end += 1;
        }
        if end - start > 1 {
            idx[start..end].shuffle(&mut rng);
        }
        start = end;
    }
    Sequence {
        order: idx.into_iter().map(|i| case.nodes[i].id.clone()).collect(),
    }
}

/// Run one ranking method end to end. `delta` only affects the resolvent.
pub fn rank(
    case: &DsmCase,
    kind: RankerKind,
    delta: Option<f64>,
    seed: u64,
) -> Result<Sequence, RankerError> {
    let delta = delta.unwrap_or(DEFAULT_RESOLVENT_DELTA);
    let scores = match kind {
        RankerKind::OutInDegree => score_out_in_degree(case),
        RankerKind::Eigenvector => score_eigenvector(case),
        RankerKind::WalkExponential => score_walk(case, WalkKind::Exponential, delta)?,
        RankerKind::WalkResolvent => score_walk(case, WalkKind::Resolvent, delta)?,
        RankerKind::Visibility => score_visibility(case),
    };
    Ok(order_from_scores(case, &scores, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::feedback_count;

    fn case(nodes: &[&str], edges: &[(&str, &str)]) -> DsmCase {
        let nodes = nodes
            .iter()
            .map(|id| format!(r#"{{"id":"{id}","name":"{id}"}}"#))
            .collect::<Vec<_>>()
            .join(",");
        let edges = edges
            .iter()
            .map(|(d, p)| format!(r#"{{"dependent":"{d}","predecessor":"{p}"}}"#))
            .collect::<Vec<_>>()
            .join(",");
        DsmCase::from_json(&format!(
            r#"{{"name":"t","network_description":"","nodes":[{nodes}],"edges":[{edges}]}}"#
        ))
        .unwrap()
    }

    fn chain3() -> DsmCase {
        case(&["n1", "n2", "n3"], &[("n2", "n1"), ("n3", "n2")])
    }

    fn cycle3() -> DsmCase {
        case(&["a", "b", "c"], &[("b", "a"), ("c", "b"), ("a", "c")])
    }

    #[test]
    fn out_in_degree_on_chain() {
        let s = score_out_in_degree(&chain3());
        assert_eq!(s.primary, vec![1.0, 0.0, -1.0]);
        assert_eq!(s.secondary, vec![1.0, 1.0, 0.0]);
        assert_eq!(s.primary_dir, SortDirection::Descending);
    }

    #[test]
    fn out_in_degree_isolated_node_scores_zero() {
        let c = case(&["n1", "n2", "iso"], &[("n2", "n1")]);
        let s = score_out_in_degree(&c);
        assert_eq!(s.primary[2], 0.0);
        assert_eq!(s.secondary[2], 0.0);
    }

    #[test]
    fn eigenvector_cycle_is_uniform_tie() {
        let s = score_eigenvector(&cycle3());
        for v in &s.primary {
            assert!((v - 1.0 / 3.0).abs() < 1e-9);
        }
        // left vector is uniform too: scores carry no ordering information
        for v in &s.secondary {
            assert!((v - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvector_nilpotent_chain_declares_tie() {
        let s = score_eigenvector(&chain3());
        assert_eq!(s.primary, vec![0.0, 0.0, 0.0]);
        assert_eq!(s.secondary, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn eigenvector_two_cycle_with_pendant_dependent() {
        // a <-> b, and c depends on a. Uniform start is already a fixed point
        // of the normalized iteration ((1/3,1/3,1/3) is a genuine eigenvector
        // for the dominant eigenvalue 1), so the pendant's component ties with
        // the cycle's rather than sitting below it.
        let c = case(&["a", "b", "c"], &[("a", "b"), ("b", "a"), ("c", "a")]);
        let s = score_eigenvector(&c);
        for v in &s.primary {
            assert!((v - 1.0 / 3.0).abs() < 1e-9, "primary {:?}", s.primary);
        }
        // the transposed iteration oscillates with period 2 -> declared tie
        assert_eq!(s.secondary, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn eigenvector_matches_exact_perron_vector() {
        // strongly connected, aperiodic: a<-c, b<-a, c<-a, c<-b (x<-y means x
        // depends on y). Characteristic polynomial is λ^3 = λ + 1, so the
        // dominant eigenvalue is the plastic number and the right eigenvector
        // is (1, 1/λ, λ) up to scale.
        let c = case(
            &["a", "b", "c"],
            &[("a", "c"), ("b", "a"), ("c", "a"), ("c", "b")],
        );
        let lambda = {
            // real root of λ^3 - λ - 1 by Newton from 1.3
            let mut x: f64 = 1.3;
            for _ in 0..60 {
                x -= (x * x * x - x - 1.0) / (3.0 * x * x - 1.0);
            }
            x
        };
        let raw = [1.0, 1.0 / lambda, lambda];
        let sum: f64 = raw.iter().sum();
        let s = score_eigenvector(&c);
        for (got, want) in s.primary.iter().zip(raw.iter().map(|v| v / sum)) {
            assert!((got - want).abs() < 1e-7, "{:?}", s.primary);
        }
        // ascending component order: b, a, c
        let seq = order_from_scores(&c, &s, 0);
        assert_eq!(seq.to_comma_string(), "b, a, c");
    }

    #[test]
    fn walk_exponential_chain_row_sums() {
        let s = score_walk(&chain3(), WalkKind::Exponential, DEFAULT_RESOLVENT_DELTA).unwrap();
        let want = [1.0, 2.0, 2.5];
        for (got, want) in s.primary.iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "{:?}", s.primary);
        }
        let seq = order_from_scores(&chain3(), &s, 5);
        assert_eq!(feedback_count(&chain3(), &seq).unwrap(), 0);
        assert_eq!(seq.to_comma_string(), "n1, n2, n3");
    }

    #[test]
    fn walk_resolvent_chain_row_sums_exact() {
        // nilpotent A: (I - δA)^(-1) = I + δA + δ²A² exactly
        let s = score_walk(&chain3(), WalkKind::Resolvent, 0.025).unwrap();
        let d = 0.025f64;
        assert_eq!(s.primary[0], 1.0);
        assert_eq!(s.primary[1], d + 1.0);
        assert_eq!(s.primary[2], (d * d + d) + 1.0);
    }

    #[test]
    fn walk_empty_edges_full_tie() {
        let c = case(&["a", "b", "c"], &[]);
        let s = score_walk(&c, WalkKind::Exponential, DEFAULT_RESOLVENT_DELTA).unwrap();
        assert_eq!(s.primary, vec![1.0, 1.0, 1.0]);
        assert_eq!(s.secondary, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn resolvent_rejects_divergent_delta() {
        // complete bidirectional triangle: spectral radius 2
        let c = case(
            &["a", "b", "c"],
            &[
                ("a", "b"),
                ("b", "a"),
                ("b", "c"),
                ("c", "b"),
                ("a", "c"),
                ("c", "a"),
            ],
        );
        let err = score_walk(&c, WalkKind::Resolvent, 0.6).unwrap_err();
        match err {
            RankerError::ResolventDiverges { delta, rho, .. } => {
                assert_eq!(delta, 0.6);
                assert!((rho - 2.0).abs() < 1e-3, "rho = {rho}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            score_walk(&c, WalkKind::Resolvent, -0.1),
            Err(RankerError::InvalidDelta(_))
        ));
        // the default delta stays well inside the radius bound
        score_walk(&c, WalkKind::Resolvent, DEFAULT_RESOLVENT_DELTA).unwrap();
    }

    #[test]
    fn visibility_chain_row_sums() {
        let s = score_visibility(&chain3());
        assert_eq!(s.primary, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.secondary, vec![3.0, 2.0, 1.0]);
        let seq = order_from_scores(&chain3(), &s, 11);
        assert_eq!(seq.to_comma_string(), "n1, n2, n3");
    }

    #[test]
    fn visibility_cycle_and_empty_are_full_ties() {
        let s = score_visibility(&cycle3());
        assert_eq!(s.primary, vec![3.0, 3.0, 3.0]);
        let c = case(&["a", "b"], &[]);
        let s = score_visibility(&c);
        assert_eq!(s.primary, vec![1.0, 1.0]);
    }

    #[test]
    fn order_from_scores_is_seed_independent_without_ties() {
        let c = chain3();
        let s = score_visibility(&c);
        let a = order_from_scores(&c, &s, 1);
        let b = order_from_scores(&c, &s, 999);
        assert_eq!(a, b);
    }

    #[test]
    fn full_tie_spreads_over_permutations() {
        let c = cycle3();
        let s = score_out_in_degree(&c); // all zeros on the symmetric cycle
        let mut seen = std::collections::HashSet::new();
        for seed in 0..30 {
            let seq = order_from_scores(&c, &s, seed);
            assert_eq!(crate::eval::check_sequence(&seq, &c), Ok(()));
            seen.insert(seq.to_comma_string());
        }
        // 30 seeds over 6 permutations: expect several distinct outcomes
        assert!(seen.len() >= 3, "only saw {seen:?}");
    }

    #[test]
    fn secondary_breaks_primary_ties_before_rng() {
        // two nodes tie on primary, differ on secondary (descending)
        let c = case(&["a", "b", "c"], &[]);
        let s = ScoreVector {
            primary: vec![1.0, 1.0, 0.0],
            secondary: vec![0.5, 2.0, 0.0],
            primary_dir: SortDirection::Ascending,
            secondary_dir: SortDirection::Descending,
        };
        for seed in 0..20 {
            let seq = order_from_scores(&c, &s, seed);
            assert_eq!(seq.to_comma_string(), "c, b, a");
        }
    }

    #[test]
    fn scale_invariance_of_primary() {
        let c = case(
            &["a", "b", "c", "d"],
            &[("b", "a"), ("c", "a"), ("d", "b"), ("d", "c"), ("c", "b")],
        );
        for kind in RankerKind::ALL {
            let mut s = match kind {
                RankerKind::OutInDegree => score_out_in_degree(&c),
                RankerKind::Eigenvector => score_eigenvector(&c),
                RankerKind::WalkExponential => {
                    score_walk(&c, WalkKind::Exponential, 0.025).unwrap()
                }
                RankerKind::WalkResolvent => score_walk(&c, WalkKind::Resolvent, 0.025).unwrap(),
                RankerKind::Visibility => score_visibility(&c),
            };
            let base = order_from_scores(&c, &s, 3);
            for v in s.primary.iter_mut() {
                *v *= 7.5;
            }
            assert_eq!(order_from_scores(&c, &s, 3), base, "{kind:?}");
        }
    }
}
