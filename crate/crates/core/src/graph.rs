//! Immutable sparse weighted undirected graph.
//!
//! Nodes are dense ids `0..n`. Parallel edges are merged by summing their
//! weights and self-loops are kept apart from the neighbor lists: a loop of
//! weight `w` at node `i` adds `2w` to `strength[i]` and `w` to the total
//! weight.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    /// Merged edges with `u <= v`, sorted.
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
    total_weight: f64,
}

/// Accumulates labelled edges and produces a [`Graph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    ids: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `label`, registering it on first sight.
    pub fn node(&mut self, label: &str) -> usize {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.ids.insert(label.to_string(), id);
        id
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Validation(format!(
                "edge weight must be positive and finite, got {w}"
            )));
        }
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(Error::Validation(format!(
                "edge ({u}, {v}) references an unknown node"
            )));
        }
        let key = if u <= v { (u, v) } else { (v, u) };
        *self.edges.entry(key).or_insert(0.0) += w;
        Ok(())
    }

    pub fn add_labelled_edge(&mut self, u: &str, v: &str, w: f64) -> Result<()> {
        let u = self.node(u);
        let v = self.node(v);
        self.add_edge(u, v, w)
    }

    pub fn build(self) -> Result<Graph> {
        if self.labels.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let edges: Vec<_> = self
            .edges
            .into_iter()
            .map(|((u, v), w)| (u, v, w))
            .collect();
        Ok(Graph::assemble(self.labels, edges))
    }
}

impl Graph {
    /// Builds a graph over nodes `0..n` labelled by their decimal id.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.node(&i.to_string());
        }
        for &(u, v, w) in edges {
            b.add_edge(u, v, w)?;
        }
        b.build()
    }

    /// Unit-weight convenience wrapper around [`Graph::from_edges`].
    pub fn from_unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_edges(n, &weighted)
    }

    fn assemble(labels: Vec<String>, edges: Vec<(usize, usize, f64)>) -> Self {
        let n = labels.len();
        let mut degree = vec![0usize; n];
        let mut self_loops = vec![0.0; n];
        let mut strength = vec![0.0; n];
        let mut total_weight = 0.0;
        for &(u, v, w) in &edges {
            total_weight += w;
            if u == v {
                self_loops[u] += w;
                strength[u] += 2.0 * w;
            } else {
                degree[u] += 1;
                degree[v] += 1;
                strength[u] += w;
                strength[v] += w;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for &(u, v, w) in &edges {
            if u == v {
                continue;
            }
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        Graph {
            labels,
            edges,
            offsets,
            targets,
            weights,
            self_loops,
            strength,
            total_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Merged edges (`u <= v`), self-loops included.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all edge weights, each undirected edge counted once.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn strength(&self, v: usize) -> f64 {
        self.strength[v]
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strength
    }

    pub fn self_loop(&self, v: usize) -> f64 {
        self.self_loops[v]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Neighbors of `v` with edge weights, self-loop excluded.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sum of weights from `v` to each community under `labels`.
    ///
    /// Self-loops are excluded; zero entries are omitted.
    pub fn weight_to_communities(&self, v: usize, labels: &[usize]) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (u, w) in self.neighbors(v) {
            *out.entry(labels[u]).or_insert(0.0) += w;
        }
        out
    }

    /// Connected components as a label per node (ids in order of lowest member).
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for (u, _) in self.neighbors(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Copy of the graph with every edge weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Validation(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v, w)| (u, v, w * factor))
            .collect();
        Ok(Graph::assemble(self.labels.clone(), edges))
    }
}
