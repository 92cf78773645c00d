//! Shared generators for integration tests: random cases, random DAGs, and a
//! deliberately unpruned exhaustive optimizer to check the real one against.
//!
//! Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use dsmseq::eval::Evaluator;
use dsmseq::rankers::{
    score_out_in_degree, score_visibility, score_walk, ScoreVector, WalkKind,
    DEFAULT_RESOLVENT_DELTA,
};
use dsmseq::{DsmCase, Edge, NodeSpec};

pub fn node_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

fn build_case(name: &str, n: usize, edges: Vec<(usize, usize)>) -> DsmCase {
    let ids = node_ids(n);
    let nodes = ids
        .iter()
        .map(|id| NodeSpec {
            id: id.as_str().into(),
            name: format!("task {id}"),
            description: None,
        })
        .collect();
    let edges = edges
        .into_iter()
        .map(|(dep, pre)| Edge {
            dependent: ids[dep].as_str().into(),
            predecessor: ids[pre].as_str().into(),
        })
        .collect();
    DsmCase::new(name, "synthetic test network", nodes, edges).expect("generator emits valid cases")
}

/// Random directed network: every ordered pair (i != j) becomes an edge with
/// probability `density`.
pub fn random_case(rng: &mut ChaCha8Rng, n: usize, density: f64) -> DsmCase {
    let mut edges = Vec::new();
    for dep in 0..n {
        for pre in 0..n {
            if dep != pre && rng.gen::<f64>() < density {
                edges.push((dep, pre));
            }
        }
    }
    build_case("random", n, edges)
}

/// Random DAG: edges only point from later topological labels to earlier
/// ones, through a hidden random relabeling so node index order carries no
/// information.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, density: f64) -> DsmCase {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..i {
            if rng.gen::<f64>() < density {
                // label[i] depends on label[j]: acyclic by construction
                edges.push((label[i], label[j]));
            }
        }
    }
    build_case("random-dag", n, edges)
}

/// Random transitively closed DAG: a dependency-on relation that already
/// includes all implied dependencies, as a fully propagated dependency
/// matrix would. On this family every degree/walk/reachability ranking is
/// strictly monotone along edges, so recovering a zero-feedback order is the
/// mathematical ground truth rather than a heuristic accident. (On
/// unconstrained DAGs counterexamples exist: a source whose only dependent
/// is a large hub gets outranked by the hub under out-in degree.)
#[allow(clippy::needless_range_loop)] // index form keeps the closure recurrence readable
pub fn random_closed_dag(rng: &mut ChaCha8Rng, n: usize, density: f64) -> DsmCase {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut depends = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..i {
            if rng.gen::<f64>() < density {
                depends[i][j] = true;
            }
        }
    }
    // Warshall closure over the hidden topological indices
    for k in 0..n {
        for i in 0..n {
            if depends[i][k] {
                for j in 0..n {
                    if depends[k][j] {
                        depends[i][j] = true;
                    }
                }
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if depends[i][j] {
                edges.push((label[i], label[j]));
            }
        }
    }
    build_case("random-closed-dag", n, edges)
}

fn has_exact_tie(scores: &ScoreVector) -> bool {
    let n = scores.primary.len();
    for a in 0..n {
        for b in (a + 1)..n {
            if scores.primary[a] == scores.primary[b]
                && scores.secondary[a] == scores.secondary[b]
            {
                return true;
            }
        }
    }
    false
}

/// True when every deterministic ranker fully separates the nodes, i.e. the
/// residual random tie-break never fires.
pub fn tie_free_for_all_rankers(case: &DsmCase) -> bool {
    let mut vectors = vec![score_out_in_degree(case), score_visibility(case)];
    match score_walk(case, WalkKind::Exponential, DEFAULT_RESOLVENT_DELTA) {
        Ok(v) => vectors.push(v),
        Err(_) => return false,
    }
    match score_walk(case, WalkKind::Resolvent, DEFAULT_RESOLVENT_DELTA) {
        Ok(v) => vectors.push(v),
        Err(_) => return false,
    }
    vectors.iter().all(|v| !has_exact_tie(v))
}

/// Minimum feedback count by checking every one of the n! orders, no pruning.
/// Ground truth for the branch-and-bound search.
pub fn unpruned_minimum(case: &DsmCase) -> u32 {
    let eval = Evaluator::new(case);
    let n = case.node_count();
    let mut perm: Vec<u32> = (0..n as u32).collect();
    let mut best = u32::MAX;
    // Heap's algorithm, iterative
    let mut c = vec![0usize; n];
    best = best.min(eval.score_perm(&perm));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(eval.score_perm(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

pub fn random_sequence(rng: &mut ChaCha8Rng, case: &DsmCase) -> dsmseq::eval::Sequence {
    let mut ids: Vec<_> = case.node_ids().cloned().collect();
    ids.shuffle(rng);
    dsmseq::eval::Sequence { order: ids }
}
