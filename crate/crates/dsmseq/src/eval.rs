//! Scoring of row orders: feedback marks above the diagonal, validity checks,
//! and the dense binary adjacency view used by the rankers.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::case::{DsmCase, NodeId};

/// A proposed row order over a case's nodes. Not guaranteed valid until
/// [`check_sequence`] passes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence {
    pub order: Vec<NodeId>,
}

impl Sequence {
    pub fn from_ids<I, T>(ids: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<NodeId>,
    {
        Sequence {
            order: ids.into_iter().map(Into::into).collect(),
        }
    }

    /// Parse a comma-separated id list; whitespace around each id is ignored
    /// and empty fragments are dropped.
    pub fn parse(text: &str) -> Self {
        Sequence {
            order: text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(NodeId::from)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn reversed(&self) -> Sequence {
        Sequence {
            order: self.order.iter().rev().cloned().collect(),
        }
    }

    /// `id1, id2, ...` — the wire form used in prompts and on the CLI.
    pub fn to_comma_string(&self) -> String {
        self.order
            .iter()
            .map(NodeId::as_str)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_comma_string())
    }
}

/// Why a sequence fails to be a permutation of the case's nodes. All three
/// defect lists are populated in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceError {
    pub missing: Vec<NodeId>,
    pub duplicates: Vec<NodeId>,
    pub unknown: Vec<NodeId>,
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ids: &[NodeId]| {
            ids.iter()
                .map(NodeId::as_str)
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "sequence is not a permutation of the case nodes:")?;
        if !self.missing.is_empty() {
            write!(f, " missing [{}]", join(&self.missing))?;
        }
        if !self.duplicates.is_empty() {
            write!(f, " duplicated [{}]", join(&self.duplicates))?;
        }
        if !self.unknown.is_empty() {
            write!(f, " unknown [{}]", join(&self.unknown))?;
        }
        Ok(())
    }
}

impl std::error::Error for SequenceError {}

/// Check that `seq` lists every node of `case` exactly once.
pub fn check_sequence(seq: &Sequence, case: &DsmCase) -> Result<(), SequenceError> {
    let mut counts: HashMap<&NodeId, usize> = HashMap::with_capacity(case.node_count());
    for id in case.node_ids() {
        counts.insert(id, 0);
    }
    let mut unknown = Vec::new();
    for id in &seq.order {
        match counts.get_mut(id) {
            Some(c) => *c += 1,
            None => {
                if !unknown.contains(id) {
                    unknown.push(id.clone());
                }
            }
        }
    }
    let mut missing = Vec::new();
    let mut duplicates = Vec::new();
    for id in case.node_ids() {
        match counts[id] {
            0 => missing.push(id.clone()),
            1 => {}
            _ => duplicates.push(id.clone()),
        }
    }
    if missing.is_empty() && duplicates.is_empty() && unknown.is_empty() {
        Ok(())
    } else {
        Err(SequenceError {
            missing,
            duplicates,
            unknown,
        })
    }
}

/// Number of feedback marks: edges whose dependent is placed before its
/// predecessor. This is the minimization objective; 0 means the order is a
/// topological sort of the dependency network.
pub fn feedback_count(case: &DsmCase, seq: &Sequence) -> Result<u32, SequenceError> {
    check_sequence(seq, case)?;
    Ok(Evaluator::new(case).score_sequence(seq))
}

/// Edges respected by the order (dependent after predecessor).
/// `feedback + feedforward == edge_count` for any valid sequence.
pub fn feedforward_count(case: &DsmCase, seq: &Sequence) -> Result<u32, SequenceError> {
    let fb = feedback_count(case, seq)?;
    Ok(case.edge_count() as u32 - fb)
}

/// Precomputed edge list over node indices, for scoring permutations in hot
/// loops without re-resolving ids.
pub struct Evaluator {
    n: usize,
    /// (dependent index, predecessor index) in case declaration order.
    edges: Vec<(u32, u32)>,
    index: HashMap<NodeId, u32>,
}

impl Evaluator {
    pub fn new(case: &DsmCase) -> Self {
        let index: HashMap<NodeId, u32> = case
            .node_ids()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        let edges = case
            .edges
            .iter()
            .map(|e| (index[&e.dependent], index[&e.predecessor]))
            .collect();
        Evaluator {
            n: case.node_count(),
            edges,
            index,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Score a permutation of node indices (`perm[k]` = node placed at row k).
    /// Caller guarantees `perm` is a permutation of `0..n`.
    pub fn score_perm(&self, perm: &[u32]) -> u32 {
        debug_assert_eq!(perm.len(), self.n);
        let mut pos = vec![0u32; self.n];
        for (k, &v) in perm.iter().enumerate() {
            pos[v as usize] = k as u32;
        }
        self.edges
            .iter()
            .filter(|&&(dep, pre)| pos[dep as usize] < pos[pre as usize])
            .count() as u32
    }

    /// Score a sequence already known to pass [`check_sequence`].
    pub fn score_sequence(&self, seq: &Sequence) -> u32 {
        let perm = self.perm_of(seq);
        self.score_perm(&perm)
    }

    pub fn perm_of(&self, seq: &Sequence) -> Vec<u32> {
        seq.order
            .iter()
            .map(|id| *self.index.get(id).expect("sequence validated against case"))
            .collect()
    }
}

/// Convert a permutation of node indices back into an id sequence.
pub fn sequence_from_perm(case: &DsmCase, perm: &[u32]) -> Sequence {
    Sequence {
        order: perm
            .iter()
            .map(|&i| case.nodes[i as usize].id.clone())
            .collect(),
    }
}

/// Dense binary adjacency over case declaration order: `a[i][j] = 1` iff node
/// `i` depends on node `j`. Zero diagonal; popcount equals the edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn from_case(case: &DsmCase) -> Self {
        let n = case.node_count();
        let mut bits = vec![false; n * n];
        let eval = Evaluator::new(case);
        for &(dep, pre) in &eval.edges {
            bits[dep as usize * n + pre as usize] = true;
        }
        AdjacencyMatrix { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn row_sum(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.get(i, j)).count()
    }

    pub fn col_sum(&self, j: usize) -> usize {
        (0..self.n).filter(|&i| self.get(i, j)).count()
    }
}

/// A sequence with its feedback score and a note on where it came from
/// ("initial", "iteration 7", "ga", ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredSolution {
    pub sequence: Sequence,
    pub score: u32,
    pub provenance: String,
}
