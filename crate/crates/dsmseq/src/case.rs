//! Case model: a named directed network of tasks plus validation and id scrambling.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque node identifier. Case files may use any non-empty string; scrambled
/// cases use 5-character alphanumeric tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: NodeId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// `dependent` needs `predecessor`'s output. In a row order, the pair is a
/// feedback mark iff the dependent is placed before the predecessor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub dependent: NodeId,
    pub predecessor: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsmCase {
    pub name: String,
    pub network_description: String,
    pub nodes: Vec<NodeSpec>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed case JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("case needs at least 2 nodes, found {0}")]
    TooFewNodes(usize),
    #[error("node id must be a non-empty string")]
    EmptyId,
    #[error("duplicate node id {0:?}")]
    DuplicateNodeId(NodeId),
    #[error("edge {role} {id:?} does not name a node")]
    UnknownEdgeEndpoint { role: &'static str, id: NodeId },
    #[error("self-loop on {0:?}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{dependent: {dependent:?}, predecessor: {predecessor:?}}}")]
    DuplicateEdge {
        dependent: NodeId,
        predecessor: NodeId,
    },
    #[error("could not draw {0} distinct random ids")]
    IdExhausted(usize),
}

impl DsmCase {
    pub fn new(
        name: impl Into<String>,
        network_description: impl Into<String>,
        nodes: Vec<NodeSpec>,
        edges: Vec<Edge>,
    ) -> Result<Self, CaseError> {
        let case = DsmCase {
            name: name.into(),
            network_description: network_description.into(),
            nodes,
            edges,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn from_json(json: &str) -> Result<Self, CaseError> {
        let case: DsmCase = serde_json::from_str(json)?;
        case.validate()?;
        Ok(case)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter().map(|n| &n.id)
    }

    /// Index of each node id in declaration order. Declaration order is the
    /// canonical row order everywhere (matrices, permutation encodings).
    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| &n.id == id)
    }

    pub fn validate(&self) -> Result<(), CaseError> {
        if self.nodes.len() < 2 {
            return Err(CaseError::TooFewNodes(self.nodes.len()));
        }
        let mut ids = HashSet::with_capacity(self.nodes.len());
        for node in &self.nodes {
            if node.id.as_str().is_empty() {
                return Err(CaseError::EmptyId);
            }
            if !ids.insert(&node.id) {
                return Err(CaseError::DuplicateNodeId(node.id.clone()));
            }
        }
        let mut seen = HashSet::with_capacity(self.edges.len());
        for edge in &self.edges {
            if !ids.contains(&edge.dependent) {
                return Err(CaseError::UnknownEdgeEndpoint {
                    role: "dependent",
                    id: edge.dependent.clone(),
                });
            }
            if !ids.contains(&edge.predecessor) {
                return Err(CaseError::UnknownEdgeEndpoint {
                    role: "predecessor",
                    id: edge.predecessor.clone(),
                });
            }
            if edge.dependent == edge.predecessor {
                return Err(CaseError::SelfLoop(edge.dependent.clone()));
            }
            if !seen.insert((&edge.dependent, &edge.predecessor)) {
                return Err(CaseError::DuplicateEdge {
                    dependent: edge.dependent.clone(),
                    predecessor: edge.predecessor.clone(),
                });
            }
        }
        Ok(())
    }
}

pub fn load_case(path: impl AsRef<Path>) -> Result<DsmCase, CaseError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CaseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    DsmCase::from_json(&text)
}

const ID_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const ID_LEN: usize = 5;

/// Replace every node id with a fresh 5-char alphanumeric token so that models
/// cannot lean on memorized identifiers. Names, descriptions, edge structure
/// and node order are preserved; the same seed always yields the same ids.
pub fn randomize_ids(case: &DsmCase, seed: u64) -> Result<DsmCase, CaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: HashSet<String> = HashSet::with_capacity(case.nodes.len());
    let mut fresh = Vec::with_capacity(case.nodes.len());
    for _ in &case.nodes {
        let mut attempts = 0;
        let token = loop {
            let token: String = (0..ID_LEN)
                .map(|_| ID_ALPHABET[rng.gen_range(0..ID_ALPHABET.len())] as char)
                .collect();
            if used.insert(token.clone()) {
                break token;
            }
            attempts += 1;
            if attempts > 64 {
                return Err(CaseError::IdExhausted(case.nodes.len()));
            }
        };
        fresh.push(NodeId::new(token));
    }
    let map = |id: &NodeId| -> NodeId {
        let idx = case.index_of(id).expect("validated case");
        fresh[idx].clone()
    };
    let nodes = case
        .nodes
        .iter()
        .zip(&fresh)
        .map(|(node, id)| NodeSpec {
            id: id.clone(),
            name: node.name.clone(),
            description: node.description.clone(),
        })
        .collect();
    let edges = case
        .edges
        .iter()
        .map(|e| Edge {
            dependent: map(&e.dependent),
            predecessor: map(&e.predecessor),
        })
        .collect();
    Ok(DsmCase {
        name: case.name.clone(),
        network_description: case.network_description.clone(),
        nodes,
        edges,
    })
}
