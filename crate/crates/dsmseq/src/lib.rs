//! Sequencing for dependency structure matrices (DSMs).
//!
//! A case is a directed network of design tasks: edge `{dependent, predecessor}`
//! means the dependent needs the predecessor's output. Placing nodes in a row
//! order induces a binary matrix; entries above the diagonal are feedback marks
//! (a task scheduled before something it depends on). Everything here searches
//! for orders with few feedback marks:
//!
//! - [`eval`] scores candidate orders and validates them against a case,
//! - [`oracle`] finds exact optima for small cases by branch and bound,
//! - [`rankers`] are one-shot orderings from network structure (degrees,
//!   eigenvectors, walk counts, reachability),
//! - [`ga`] is a permutation genetic algorithm with order crossover,
//! - [`optimizer`] drives an LLM through propose/score/retry rounds over a
//!   growing base of scored solutions, via the backends in [`llm`],
//! - [`harness`] runs method x case x seed grids and writes CSV traces/tables.

pub mod case;
pub mod eval;
pub mod ga;
pub mod harness;
pub mod llm;
pub mod matrix;
pub mod metrics;
pub mod optimizer;
pub mod oracle;
pub mod rankers;
pub mod trace;

pub use case::{load_case, randomize_ids, CaseError, DsmCase, Edge, NodeId, NodeSpec};
pub use eval::{
    check_sequence, feedback_count, feedforward_count, AdjacencyMatrix, Evaluator, ScoredSolution,
    Sequence, SequenceError,
};
pub use metrics::{network_metrics, NetworkMetrics};
pub use oracle::{brute_force_optimum, OracleError, DEFAULT_NODE_LIMIT};
