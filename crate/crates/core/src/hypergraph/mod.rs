//! Hypergraph data model, ingestion and preprocessing filters.
//!
//! Nodes are dense indices `0..n`. Every hyperedge is stored as a strictly
//! increasing list of node indices and the edge list itself is kept sorted
//! and free of duplicates, so membership queries are a binary search.

mod features;
mod filters;
mod io;

pub use features::{normalize_features, read_feature_csv, FeatureMatrix, Normalization};
pub use filters::{
    degree_threshold_filter, k_core_filter, largest_connected_component, project_to_graph,
};
pub use io::{
    read_edge_list, read_simplicial, write_edge_list, write_label_map, LoadOptions,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A hyperedge: strictly increasing node indices.
pub type Edge = Vec<usize>;

/// Inclusive range of hyperedge orders `[min, max]` with `min >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRange {
    min: usize,
    max: usize,
}

impl OrderRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min < 2 || min > max {
            return Err(Error::invalid(format!(
                "order range [{min}, {max}] must satisfy 2 <= min <= max"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(k, k)
    }

    pub fn min(&self) -> usize {
        self.min
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn len(&self) -> usize {
        self.max - self.min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.min..=self.max).contains(&k)
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.min..=self.max
    }

    /// Index of order `k` inside the range.
    pub fn index(&self, k: usize) -> usize {
        k - self.min
    }
}

/// An undirected, unweighted hypergraph with set semantics on its edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Edge>,
    labels: Vec<String>,
}

impl Hypergraph {
    /// Builds a hypergraph from raw edges.
    ///
    /// Each edge is sorted and repeated nodes are collapsed; edges that end up
    /// with fewer than two nodes are dropped and duplicate edges are merged.
    pub fn new(n: usize, edges: Vec<Edge>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != n {
            return Err(Error::invalid(format!(
                "{} labels supplied for {n} nodes",
                labels.len()
            )));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for mut edge in edges {
            edge.sort_unstable();
            edge.dedup();
            if let Some(&last) = edge.last() {
                if last >= n {
                    return Err(Error::invalid(format!(
                        "node index {last} out of range for n={n}"
                    )));
                }
            }
            if edge.len() >= 2 {
                normalized.push(edge);
            }
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Self {
            n,
            edges: normalized,
            labels,
        })
    }

    /// Builds a hypergraph whose labels are the node indices themselves.
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::new(n, edges, labels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of hyperedges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    /// Smallest and largest edge order present, if there are edges.
    pub fn order_range(&self) -> Option<OrderRange> {
        let min = self.edges.iter().map(Vec::len).min()?;
        let max = self.edges.iter().map(Vec::len).max()?;
        OrderRange::new(min, max).ok()
    }

    pub fn contains(&self, edge: &[usize]) -> bool {
        self.edges
            .binary_search_by(|e| e.as_slice().cmp(edge))
            .is_ok()
    }

    /// Number of hyperedges of each order in `orders`.
    pub fn edge_counts_by_order(&self, orders: OrderRange) -> Vec<u64> {
        let mut counts = vec![0u64; orders.len()];
        for e in &self.edges {
            if orders.contains(e.len()) {
                counts[orders.index(e.len())] += 1;
            }
        }
        counts
    }

    /// `deg(v)`: the number of hyperedges containing `v`.
    pub fn degree_vector(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Edge ids incident to each node.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(id);
            }
        }
        inc
    }

    /// Sub-hypergraph on the nodes with `keep[v]`, keeping only edges that lie
    /// entirely inside the kept set. Nodes are reindexed in their original order.
    pub fn induced(&self, keep: &[bool]) -> Hypergraph {
        let mut new_index = vec![usize::MAX; self.n];
        let mut labels = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                new_index[v] = labels.len();
                labels.push(self.labels[v].clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| keep[v]))
            .map(|e| e.iter().map(|&v| new_index[v]).collect())
            .collect();
        // Reindexing is monotone, so edges stay sorted and unique.
        Hypergraph {
            n: labels.len(),
            edges,
            labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_vector_counts_incidences() {
        let h = Hypergraph::from_edges(3, vec![vec![0, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(h.degree_vector(), vec![2, 2, 1]);
    }

    #[test]
    fn isolated_node_has_zero_degree() {
        let h = Hypergraph::from_edges(4, vec![vec![0, 1]]).unwrap();
        assert_eq!(h.degree_vector()[3], 0);
    }

    #[test]
    fn complete_three_uniform_on_four_nodes() {
        let edges = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        let h = Hypergraph::from_edges(4, edges).unwrap();
        assert_eq!(h.degree_vector(), vec![3; 4]);
    }

    #[test]
    fn constructor_normalizes_edges() {
        let h = Hypergraph::from_edges(3, vec![vec![2, 0], vec![0, 2], vec![1, 1]]).unwrap();
        assert_eq!(h.edges(), &[vec![0, 2]]);
        assert!(h.contains(&[0, 2]));
        assert!(!h.contains(&[0, 1]));
    }

    #[test]
    fn rejects_out_of_range_nodes() {
        assert!(Hypergraph::from_edges(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn order_range_validation() {
        assert!(OrderRange::new(1, 3).is_err());
        assert!(OrderRange::new(3, 2).is_err());
        let r = OrderRange::new(2, 4).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.index(4), 2);
    }
}
