//! Weighted hypergraphs and their incidence operators.
//!
//! A hypergraph on `n` nodes and `m` hyperedges is stored through its binary
//! incidence matrix `B` (n x m), kept twice: once column-wise (members of each
//! edge) and once row-wise (edges incident to each node). Edge weights form the
//! diagonal matrix `W`, node weights the diagonal matrix `N`.
//!
//! The two products needed by the centrality iteration are
//!
//! ```text
//! (B W y)_i   = sum_{e : i in e} w(e) y_e
//! (B^T N x)_e = sum_{i in e} nu(i) x_i
//! ```
//!
//! Both are gathers over the appropriate index, so the reduction order is fixed
//! and results are bit-reproducible.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("hypergraph has no edges")]
    NoEdges,
    #[error("edge {edge} has no members")]
    EmptyEdge { edge: usize },
    #[error("edge {edge} has non-positive or non-finite weight {weight}")]
    InvalidEdgeWeight { edge: usize, weight: f64 },
    #[error("node {node} has non-positive or non-finite weight {weight}")]
    InvalidNodeWeight { node: usize, weight: f64 },
    #[error("edge {edge} references node {node} but the hypergraph has {n} nodes")]
    NodeOutOfRange { edge: usize, node: usize, n: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Immutable weighted hypergraph with a dual-indexed incidence structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphData", into = "HypergraphData")]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    node_edges: Vec<Vec<usize>>,
    edge_weights: Vec<f64>,
    node_weights: Vec<f64>,
}

/// Plain serialized form of a [`Hypergraph`]; deserialization rebuilds and
/// revalidates the incidence indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypergraphData {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
    pub edge_weights: Vec<f64>,
    pub node_weights: Vec<f64>,
}

impl From<Hypergraph> for HypergraphData {
    fn from(h: Hypergraph) -> Self {
        HypergraphData {
            n: h.n,
            edges: h.edges,
            edge_weights: h.edge_weights,
            node_weights: h.node_weights,
        }
    }
}

impl TryFrom<HypergraphData> for Hypergraph {
    type Error = HypergraphError;

    fn try_from(data: HypergraphData) -> Result<Self, Self::Error> {
        if data.edges.len() != data.edge_weights.len() {
            return Err(HypergraphError::LengthMismatch {
                expected: data.edges.len(),
                got: data.edge_weights.len(),
            });
        }
        Hypergraph::with_nodes(
            data.n,
            data.edges.into_iter().zip(data.edge_weights),
            Some(data.node_weights),
        )
    }
}

fn check_weight(w: f64) -> bool {
    w.is_finite() && w > 0.0
}

impl Hypergraph {
    /// Builds a hypergraph whose node count is inferred from the largest node
    /// id, or taken from `node_weights` when those are supplied.
    ///
    /// Repeated node ids inside one edge are collapsed. Edges with identical
    /// member sets are merged and their weights summed; merged edges keep the
    /// position of their first occurrence.
    pub fn from_edges<I>(edges: I, node_weights: Option<Vec<f64>>) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let edges: Vec<(Vec<usize>, f64)> = edges.into_iter().collect();
        let n = match &node_weights {
            Some(nw) => nw.len(),
            None => edges
                .iter()
                .flat_map(|(members, _)| members.iter().copied())
                .max()
                .map_or(0, |max| max + 1),
        };
        Self::with_nodes(n, edges, node_weights)
    }

    /// Builds a hypergraph over exactly `n` nodes. Nodes that appear in no
    /// edge are kept as isolated nodes.
    pub fn with_nodes<I>(
        n: usize,
        edges: I,
        node_weights: Option<Vec<f64>>,
    ) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let node_weights = match node_weights {
            Some(nw) => {
                if nw.len() != n {
                    return Err(HypergraphError::LengthMismatch {
                        expected: n,
                        got: nw.len(),
                    });
                }
                if let Some((node, &weight)) =
                    nw.iter().enumerate().find(|(_, &w)| !check_weight(w))
                {
                    return Err(HypergraphError::InvalidNodeWeight { node, weight });
                }
                nw
            }
            None => vec![1.0; n],
        };

        let mut merged: Vec<Vec<usize>> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for (edge, (mut members, weight)) in edges.into_iter().enumerate() {
            if !check_weight(weight) {
                return Err(HypergraphError::InvalidEdgeWeight { edge, weight });
            }
            if members.is_empty() {
                return Err(HypergraphError::EmptyEdge { edge });
            }
            members.sort_unstable();
            members.dedup();
            if let Some(&node) = members.iter().find(|&&i| i >= n) {
                return Err(HypergraphError::NodeOutOfRange { edge, node, n });
            }
            match seen.get(&members) {
                Some(&e) => weights[e] += weight,
                None => {
                    seen.insert(members.clone(), merged.len());
                    merged.push(members);
                    weights.push(weight);
                }
            }
        }
        if merged.is_empty() {
            return Err(HypergraphError::NoEdges);
        }

        let mut node_edges = vec![Vec::new(); n];
        for (e, members) in merged.iter().enumerate() {
            for &i in members {
                node_edges[i].push(e);
            }
        }

        Ok(Hypergraph {
            n,
            edges: merged,
            node_edges,
            edge_weights: weights,
            node_weights,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted member node ids of edge `e`.
    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Sorted ids of the edges containing node `i`.
    pub fn node_edges(&self, i: usize) -> &[usize] {
        &self.node_edges[i]
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    /// Number of edges containing node `i`.
    pub fn node_degree(&self, i: usize) -> usize {
        self.node_edges[i].len()
    }

    /// Weighted degree `d_i = sum_{e : i in e} w(e)`.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.node_edges[i]
            .iter()
            .map(|&e| self.edge_weights[e])
            .sum()
    }

    /// Ids of nodes that belong to no edge.
    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.node_edges[i].is_empty())
            .collect()
    }

    /// `Some(k)` when every edge has exactly `k` members.
    pub fn uniform_size(&self) -> Option<usize> {
        let k = self.edges[0].len();
        self.edges.iter().all(|e| e.len() == k).then_some(k)
    }

    pub fn has_unit_node_weights(&self) -> bool {
        self.node_weights.iter().all(|&w| w == 1.0)
    }

    /// `B W y`.
    pub fn apply_bw(&self, y: &[f64]) -> Result<Vec<f64>, HypergraphError> {
        check_len(self.num_edges(), y.len())?;
        let mut out = vec![0.0; self.n];
        self.apply_bw_into(y, &mut out);
        Ok(out)
    }

    /// `B^T N x`.
    pub fn apply_btn(&self, x: &[f64]) -> Result<Vec<f64>, HypergraphError> {
        check_len(self.n, x.len())?;
        let mut out = vec![0.0; self.num_edges()];
        self.apply_btn_into(x, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_bw_into(&self, y: &[f64], out: &mut [f64]) {
        for (slot, incident) in out.iter_mut().zip(&self.node_edges) {
            *slot = incident.iter().map(|&e| self.edge_weights[e] * y[e]).sum();
        }
    }

    pub(crate) fn apply_btn_into(&self, x: &[f64], out: &mut [f64]) {
        for (slot, members) in out.iter_mut().zip(&self.edges) {
            *slot = members.iter().map(|&i| self.node_weights[i] * x[i]).sum();
        }
    }

    /// Clique expansion: nodes `i != j` are joined with weight
    /// `sum_{e : i, j in e} w(e)`, and node degrees are `d_i = sum_{e ∋ i} w(e)`,
    /// so that `B W B^T = A_H + D_H`.
    pub fn clique_expansion(&self) -> WeightedGraph {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.n];
        for (members, &w) in self.edges.iter().zip(&self.edge_weights) {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    *rows[i].entry(j).or_insert(0.0) += w;
                    *rows[j].entry(i).or_insert(0.0) += w;
                }
            }
        }
        let degrees = (0..self.n).map(|i| self.weighted_degree(i)).collect();
        WeightedGraph::from_rows(rows, degrees)
    }

    /// Line graph: edges `e1 != e2` are joined with weight equal to the summed
    /// node weights of their shared nodes; the degree of `e` is
    /// `delta_e = sum_{i in e} nu(i)`, so that `B^T N B = A^(e) + Delta`.
    pub fn line_graph_expansion(&self) -> WeightedGraph {
        let m = self.num_edges();
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
        for (incident, &nu) in self.node_edges.iter().zip(&self.node_weights) {
            for (a, &e1) in incident.iter().enumerate() {
                for &e2 in &incident[a + 1..] {
                    *rows[e1].entry(e2).or_insert(0.0) += nu;
                    *rows[e2].entry(e1).or_insert(0.0) += nu;
                }
            }
        }
        let degrees = self
            .edges
            .iter()
            .map(|members| members.iter().map(|&i| self.node_weights[i]).sum())
            .collect();
        WeightedGraph::from_rows(rows, degrees)
    }

    /// Whether the bipartite node/edge incidence graph is connected, i.e. a
    /// breadth-first search from node 0 reaches all `n + m` vertices.
    pub fn bipartite_connected(&self) -> bool {
        let m = self.num_edges();
        let total = self.n + m;
        if total == 0 {
            return true;
        }
        // vertices 0..n are nodes, n..n+m are edges
        let mut seen = vec![false; total];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0);
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            let neighbors: Box<dyn Iterator<Item = usize>> = if v < self.n {
                Box::new(self.node_edges[v].iter().map(|&e| self.n + e))
            } else {
                Box::new(self.edges[v - self.n].iter().copied())
            };
            for u in neighbors {
                if !seen[u] {
                    seen[u] = true;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        reached == total
    }

    /// Summary statistics over the (aggregated) edge set.
    pub fn stats(&self) -> HypergraphStats {
        let m = self.num_edges() as f64;
        let mean_weight = self.edge_weights.iter().sum::<f64>() / m;
        let var_weight = self
            .edge_weights
            .iter()
            .map(|w| (w - mean_weight).powi(2))
            .sum::<f64>()
            / m;
        HypergraphStats {
            nodes: self.n,
            edges: self.num_edges(),
            max_edge_weight: self.edge_weights.iter().copied().fold(0.0, f64::max),
            mean_edge_weight: mean_weight,
            var_edge_weight: var_weight,
            max_edge_size: self.edges.iter().map(Vec::len).max().unwrap_or(0),
            mean_edge_size: self.edges.iter().map(Vec::len).sum::<usize>() as f64 / m,
        }
    }

    /// Removes the nodes in `remove` and renumbers the rest densely, keeping
    /// their relative order. Returns the new hypergraph and, for each new id,
    /// the old id it came from. Only isolated nodes may be removed.
    pub(crate) fn without_isolated(&self) -> (Hypergraph, Vec<usize>) {
        let kept: Vec<usize> = (0..self.n)
            .filter(|&i| !self.node_edges[i].is_empty())
            .collect();
        let mut new_id = vec![usize::MAX; self.n];
        for (new, &old) in kept.iter().enumerate() {
            new_id[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .map(|members| members.iter().map(|&i| new_id[i]).collect::<Vec<_>>())
            .zip(self.edge_weights.iter().copied());
        let node_weights = kept.iter().map(|&i| self.node_weights[i]).collect();
        let h = Hypergraph::with_nodes(kept.len(), edges, Some(node_weights))
            .expect("pruning preserves validity");
        (h, kept)
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), HypergraphError> {
    if expected == got {
        Ok(())
    } else {
        Err(HypergraphError::LengthMismatch { expected, got })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypergraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub max_edge_weight: f64,
    pub mean_edge_weight: f64,
    /// Population variance of the edge weights.
    pub var_edge_weight: f64,
    pub max_edge_size: usize,
    pub mean_edge_size: f64,
}

/// Undirected weighted graph with a separately stored degree diagonal. Used
/// for the clique expansion and the line graph of a hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    /// Off-diagonal neighbors of each vertex, sorted by id.
    rows: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl WeightedGraph {
    fn from_rows(rows: Vec<BTreeMap<usize, f64>>, degrees: Vec<f64>) -> Self {
        WeightedGraph {
            rows: rows.into_iter().map(|r| r.into_iter().collect()).collect(),
            degrees,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.degrees.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Off-diagonal adjacency weight; zero on the diagonal and for non-adjacent pairs.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0.0, |pos| self.rows[i][pos].1)
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Dense adjacency matrix (zero diagonal).
    pub fn dense_adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.num_vertices();
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                dense[i][j] = w;
            }
        }
        dense
    }

    /// Dense `A + D`.
    pub fn dense_with_degrees(&self) -> Vec<Vec<f64>> {
        let mut dense = self.dense_adjacency();
        for (i, row) in dense.iter_mut().enumerate() {
            row[i] = self.degrees[i];
        }
        dense
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(members: Vec<usize>, w: f64) -> Hypergraph {
        Hypergraph::from_edges(vec![(members, w)], None).unwrap()
    }

    #[test]
    fn single_edge_graph() {
        let h = single(vec![0, 1], 1.0);
        assert_eq!(h.num_nodes(), 2);
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.edge_weights(), &[1.0]);
        assert_eq!(h.weighted_degree(0), 1.0);
        assert_eq!(h.weighted_degree(1), 1.0);
    }

    #[test]
    fn duplicate_edges_are_merged() {
        let h =
            Hypergraph::from_edges(vec![(vec![0, 1, 2], 1.0), (vec![2, 1, 0], 1.0)], None).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.edge_weights(), &[2.0]);
    }

    #[test]
    fn duplicate_members_collapse() {
        let h = single(vec![5, 5, 7], 1.0);
        assert_eq!(h.edge(0), &[5, 7]);
        assert_eq!(h.num_nodes(), 8);
        assert_eq!(h.isolated_nodes(), vec![0, 1, 2, 3, 4, 6]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Hypergraph::from_edges(Vec::<(Vec<usize>, f64)>::new(), None),
            Err(HypergraphError::NoEdges)
        );
        assert!(matches!(
            Hypergraph::from_edges(vec![(vec![0, 1], 0.0)], None),
            Err(HypergraphError::InvalidEdgeWeight { edge: 0, .. })
        ));
        assert!(matches!(
            Hypergraph::from_edges(vec![(vec![0, 1], -2.0)], None),
            Err(HypergraphError::InvalidEdgeWeight { .. })
        ));
        assert!(matches!(
            Hypergraph::from_edges(vec![(vec![0, 1], 1.0)], Some(vec![1.0, 0.0])),
            Err(HypergraphError::InvalidNodeWeight { node: 1, .. })
        ));
        assert!(matches!(
            Hypergraph::from_edges(vec![(vec![0, 1], 1.0), (vec![], 1.0)], None),
            Err(HypergraphError::EmptyEdge { edge: 1 })
        ));
        assert!(matches!(
            Hypergraph::from_edges(vec![(vec![0, 3], 1.0)], Some(vec![1.0; 2])),
            Err(HypergraphError::NodeOutOfRange { node: 3, .. })
        ));
    }

    #[test]
    fn incidence_products() {
        let h = single(vec![0, 1], 1.0);
        assert_eq!(h.apply_bw(&[1.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(h.apply_btn(&[1.0, 1.0]).unwrap(), vec![2.0]);

        let h = single(vec![0, 1, 2], 3.0);
        assert_eq!(h.apply_bw(&[2.0]).unwrap(), vec![6.0, 6.0, 6.0]);

        let h =
            Hypergraph::from_edges(vec![(vec![0, 1, 2], 1.0)], Some(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(h.apply_btn(&[1.0, 1.0, 1.0]).unwrap(), vec![6.0]);

        assert_eq!(
            h.apply_bw(&[1.0, 2.0]),
            Err(HypergraphError::LengthMismatch {
                expected: 1,
                got: 2
            })
        );
        assert_eq!(
            h.apply_btn(&[1.0]),
            Err(HypergraphError::LengthMismatch {
                expected: 3,
                got: 1
            })
        );
    }

    #[test]
    fn clique_expansion_of_single_edge() {
        let g = single(vec![0, 1, 2], 1.0).clique_expansion();
        for i in 0..3 {
            assert_eq!(g.degree(i), 1.0);
            assert_eq!(g.weight(i, i), 0.0);
            for j in 0..3 {
                if i != j {
                    assert_eq!(g.weight(i, j), 1.0);
                }
            }
        }
    }

    #[test]
    fn clique_expansion_of_plain_graph() {
        let h = Hypergraph::from_edges(
            vec![(vec![0, 1], 2.0), (vec![1, 2], 0.5), (vec![0, 3], 1.5)],
            None,
        )
        .unwrap();
        let a = h.clique_expansion().dense_adjacency();
        let expected = vec![
            vec![0.0, 2.0, 0.0, 1.5],
            vec![2.0, 0.0, 0.5, 0.0],
            vec![0.0, 0.5, 0.0, 0.0],
            vec![1.5, 0.0, 0.0, 0.0],
        ];
        assert_eq!(a, expected);
    }

    #[test]
    fn line_graph_examples() {
        let g = Hypergraph::from_edges(vec![(vec![0, 1], 1.0), (vec![1, 2], 1.0)], None)
            .unwrap()
            .line_graph_expansion();
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.degrees(), &[2.0, 2.0]);

        let g = Hypergraph::from_edges(vec![(vec![0, 1], 1.0), (vec![2, 3], 1.0)], None)
            .unwrap()
            .line_graph_expansion();
        assert_eq!(g.weight(0, 1), 0.0);
        assert!(g.neighbors(0).is_empty());
    }

    #[test]
    fn bipartite_connectivity() {
        assert!(single(vec![0, 1, 2, 3], 1.0).bipartite_connected());
        let disjoint =
            Hypergraph::from_edges(vec![(vec![0, 1], 1.0), (vec![2, 3], 1.0)], None).unwrap();
        assert!(!disjoint.bipartite_connected());
        let isolated = Hypergraph::with_nodes(3, vec![(vec![0, 1], 1.0)], None).unwrap();
        assert!(!isolated.bipartite_connected());
        let sunflower = Hypergraph::from_edges(
            vec![
                (vec![0, 1, 2], 1.0),
                (vec![0, 3, 4], 1.0),
                (vec![0, 5, 6], 1.0),
            ],
            None,
        )
        .unwrap();
        assert!(sunflower.bipartite_connected());
    }

    #[test]
    fn pruning_renumbers_in_order() {
        let h = Hypergraph::with_nodes(4, vec![(vec![0, 3], 1.0), (vec![3], 2.0)], None).unwrap();
        let (pruned, kept) = h.without_isolated();
        assert_eq!(kept, vec![0, 3]);
        assert_eq!(pruned.num_nodes(), 2);
        assert_eq!(pruned.edges(), &[vec![0, 1], vec![1]]);
    }

    #[test]
    fn stats_of_small_instance() {
        let h = Hypergraph::from_edges(
            vec![(vec![0, 1], 1.0), (vec![0, 1, 2], 1.0), (vec![1, 0], 1.0)],
            None,
        )
        .unwrap();
        let s = h.stats();
        assert_eq!(s.edges, 2);
        assert_eq!(s.max_edge_weight, 2.0);
        assert_eq!(s.mean_edge_weight, 1.5);
        assert_eq!(s.var_edge_weight, 0.25);
        assert_eq!(s.max_edge_size, 3);
        assert_eq!(s.mean_edge_size, 2.5);
    }
}
