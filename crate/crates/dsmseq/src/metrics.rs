//! Descriptive network statistics for a case.
//!
//! Density and average degree treat each directed edge as one link:
//! `density = 2E / (N (N - 1))`, `average_degree = 2E / N`. Diameter,
//! clustering and average path length are computed on the undirected simple
//! projection (parallel/antiparallel edges collapse); if that projection is
//! disconnected they describe the largest connected component and
//! `projection_connected` is false.

use serde::Serialize;

use crate::case::DsmCase;
use crate::eval::AdjacencyMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkMetrics {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    pub average_degree: f64,
    pub diameter: u32,
    pub clustering_coefficient: f64,
    pub average_path_length: f64,
    pub projection_connected: bool,
}

pub fn network_metrics(case: &DsmCase) -> NetworkMetrics {
    let n = case.node_count();
    let e = case.edge_count();
    let adj = AdjacencyMatrix::from_case(case);

    // undirected simple projection
    let mut und = vec![vec![false; n]; n];
    for (i, j) in (0..n).flat_map(|i| (0..n).map(move |j| (i, j))) {
        if adj.get(i, j) {
            und[i][j] = true;
            und[j][i] = true;
        }
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| und[i][j]).collect())
        .collect();

    // BFS from every node; track component labels as we go
    let mut component = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let label = components.len();
        let mut members = vec![start];
        component[start] = label;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &neighbors[u] {
                if component[v] == usize::MAX {
                    component[v] = label;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        components.push(members);
    }
    let projection_connected = components.len() == 1;
    let largest = components
        .iter()
        .max_by_key(|m| m.len())
        .expect("validated case has nodes");

    // distances within the largest component
    let mut diameter = 0u32;
    let mut dist_sum = 0u64;
    let mut pair_count = 0u64;
    for &src in largest {
        let mut dist = vec![u32::MAX; n];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &neighbors[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for &dst in largest {
            if dst != src {
                let d = dist[dst];
                debug_assert_ne!(d, u32::MAX, "component members are reachable");
                diameter = diameter.max(d);
                dist_sum += d as u64;
                pair_count += 1;
            }
        }
    }
    let average_path_length = if pair_count == 0 {
        0.0
    } else {
        dist_sum as f64 / pair_count as f64
    };

    // local clustering averaged over all nodes; degree < 2 contributes 0
    let mut clustering_sum = 0.0;
    for nbrs in &neighbors {
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        let mut links = 0usize;
        for (a, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[a + 1..] {
                if und[u][v] {
                    links += 1;
                }
            }
        }
        clustering_sum += 2.0 * links as f64 / (k as f64 * (k as f64 - 1.0));
    }

    NetworkMetrics {
        node_count: n,
        edge_count: e,
        density: 2.0 * e as f64 / (n as f64 * (n as f64 - 1.0)),
        average_degree: 2.0 * e as f64 / n as f64,
        diameter,
        clustering_coefficient: clustering_sum / n as f64,
        average_path_length,
        projection_connected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::DsmCase;

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

    #[test]
    fn two_nodes_one_edge() {
        let m = network_metrics(&case(&["a", "b"], &[("b", "a")]));
        assert_eq!(m.density, 1.0);
        assert_eq!(m.average_degree, 1.0);
        assert_eq!(m.diameter, 1);
        assert_eq!(m.average_path_length, 1.0);
        assert_eq!(m.clustering_coefficient, 0.0);
        assert!(m.projection_connected);
    }

    #[test]
    fn triangle_is_fully_clustered() {
        let m = network_metrics(&case(
            &["a", "b", "c"],
            &[("b", "a"), ("c", "b"), ("a", "c")],
        ));
        assert_eq!(m.clustering_coefficient, 1.0);
        assert_eq!(m.diameter, 1);
        assert_eq!(m.average_path_length, 1.0);
    }

    #[test]
    fn star_distances() {
        // hub h with 3 leaves: diameter 2, APL = (6*1 + 6*2)/12 = 1.5
        let m = network_metrics(&case(
            &["h", "x", "y", "z"],
            &[("x", "h"), ("y", "h"), ("z", "h")],
        ));
        assert_eq!(m.diameter, 2);
        assert_eq!(m.average_path_length, 1.5);
        assert_eq!(m.clustering_coefficient, 0.0);
    }

    #[test]
    fn antiparallel_edges_collapse_in_projection() {
        // a<->b plus pendant c: projection is a path of 3 nodes
        let m = network_metrics(&case(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "a"), ("c", "b")],
        ));
        assert_eq!(m.edge_count, 3);
        assert_eq!(m.diameter, 2);
        assert!(m.projection_connected);
    }

    #[test]
    fn disconnected_projection_reports_largest_component() {
        // component {a,b,c} path + isolated pair {x,y}
        let m = network_metrics(&case(
            &["a", "b", "c", "x", "y"],
            &[("b", "a"), ("c", "b"), ("y", "x")],
        ));
        assert!(!m.projection_connected);
        assert_eq!(m.diameter, 2);
        assert_eq!(m.average_path_length, (1.0 + 1.0 + 2.0) * 2.0 / 6.0);
    }
}
