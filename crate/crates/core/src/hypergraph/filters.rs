use std::collections::{BTreeSet, VecDeque};

use super::{Edge, Hypergraph};
use crate::error::{Error, Result};

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Sub-hypergraph on the largest connected component of the node-edge
/// incidence structure.
///
/// Ties in component size go to the component whose smallest original label
/// sorts first.
pub fn largest_connected_component(h: &Hypergraph) -> Hypergraph {
    let n = h.n();
    if n == 0 {
        return h.clone();
    }
    let mut dsu = DisjointSets::new(n);
    for e in h.edges() {
        for w in e.windows(2) {
            dsu.union(w[0], w[1]);
        }
    }
    // root -> (size, smallest label)
    let mut best: Option<(usize, usize, &str)> = None;
    let mut min_label: Vec<Option<&str>> = vec![None; n];
    for v in 0..n {
        let root = dsu.find(v);
        let label = h.label(v);
        min_label[root] = Some(match min_label[root] {
            Some(l) if l <= label => l,
            _ => label,
        });
    }
    for v in 0..n {
        if dsu.find(v) != v {
            continue;
        }
        let size = dsu.size[v];
        let label = min_label[v].unwrap_or_default();
        let better = match best {
            None => true,
            Some((s, _, l)) => size > s || (size == s && label < l),
        };
        if better {
            best = Some((size, v, label));
        }
    }
    let root = best.map(|b| b.1).unwrap_or(0);
    let keep: Vec<bool> = (0..n).map(|v| dsu.find(v) == root).collect();
    h.induced(&keep)
}

/// Removes, in a single pass, every node whose degree is below `delta`
/// together with every edge that touches a removed node.
pub fn degree_threshold_filter(h: &Hypergraph, delta: usize) -> Result<Hypergraph> {
    if delta == 0 {
        return Err(Error::invalid("degree threshold must be at least 1"));
    }
    let deg = h.degree_vector();
    let keep: Vec<bool> = deg.iter().map(|&d| d >= delta).collect();
    let out = h.induced(&keep);
    if out.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(out)
}

/// Maximal sub-hypergraph in which every node has degree at least `delta`,
/// found by repeatedly peeling low-degree nodes and their edges.
pub fn k_core_filter(h: &Hypergraph, delta: usize) -> Result<Hypergraph> {
    if delta == 0 {
        return Err(Error::invalid("core order must be at least 1"));
    }
    let n = h.n();
    let incidence = h.incidence();
    let mut deg = h.degree_vector();
    let mut node_alive = vec![true; n];
    let mut edge_alive = vec![true; h.m()];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] < delta).collect();
    while let Some(v) = queue.pop_front() {
        if !node_alive[v] {
            continue;
        }
        node_alive[v] = false;
        for &id in &incidence[v] {
            if !edge_alive[id] {
                continue;
            }
            edge_alive[id] = false;
            for &u in &h.edges()[id] {
                if u != v && node_alive[u] {
                    deg[u] -= 1;
                    if deg[u] < delta {
                        queue.push_back(u);
                    }
                }
            }
        }
    }
    let out = h.induced(&node_alive);
    if out.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(out)
}

/// Replaces every hyperedge by the clique on its nodes.
pub fn project_to_graph(h: &Hypergraph) -> Hypergraph {
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in h.edges() {
        for (a, &u) in e.iter().enumerate() {
            for &v in &e[a + 1..] {
                pairs.insert((u, v));
            }
        }
    }
    let edges: Vec<Edge> = pairs.into_iter().map(|(u, v)| vec![u, v]).collect();
    Hypergraph {
        n: h.n,
        edges,
        labels: h.labels.clone(),
    }
}
