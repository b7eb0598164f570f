//! Louvain baseline: local moving to the best neighboring community, then
//! aggregation of communities into super-nodes, repeated until stable.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LouvainConfig {
    pub seed: u64,
    /// Shuffle the node visit order on every pass.
    pub shuffle: bool,
    /// Minimum modularity improvement for another aggregation level.
    pub tolerance: f64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            seed: 0,
            shuffle: true,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LouvainResult {
    pub partition: Partition,
    pub score: f64,
    /// Modularity after each completed level.
    pub levels: Vec<f64>,
}

/// Weighted graph whose nodes may stand for whole communities of the
/// original graph. Internal weight of a super-node lives in its self-loop.
#[derive(Debug, Clone)]
pub struct CondensedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    strength: Vec<f64>,
    m: f64,
}

impl CondensedGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.node_count();
        CondensedGraph {
            adj: (0..n).map(|v| g.neighbors(v).collect()).collect(),
            loops: (0..n).map(|v| g.self_loop(v)).collect(),
            strength: g.strengths().to_vec(),
            m: g.total_weight(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Modularity of a community assignment over this graph's nodes.
    pub fn modularity(&self, comm: &[usize]) -> f64 {
        let k = comm.iter().max().map_or(0, |c| c + 1);
        let mut internal = vec![0.0; k];
        let mut total = vec![0.0; k];
        for v in 0..self.node_count() {
            total[comm[v]] += self.strength[v];
            internal[comm[v]] += self.loops[v];
            for &(u, w) in &self.adj[v] {
                if u > v && comm[u] == comm[v] {
                    internal[comm[v]] += w;
                }
            }
        }
        let two_m = 2.0 * self.m;
        internal
            .iter()
            .zip(&total)
            .map(|(&w, &s)| w / self.m - (s / two_m).powi(2))
            .sum()
    }

    /// Collapses each community of `comm` (dense ids) into one node.
    pub fn aggregate(&self, comm: &[usize]) -> CondensedGraph {
        let k = comm.iter().max().map_or(0, |c| c + 1);
        let mut loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut acc: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for v in 0..self.node_count() {
            let cv = comm[v];
            strength[cv] += self.strength[v];
            loops[cv] += self.loops[v];
            for &(u, w) in &self.adj[v] {
                let cu = comm[u];
                if cu == cv {
                    if u > v {
                        loops[cv] += w;
                    }
                } else {
                    acc[cv].push((cu, w));
                }
            }
        }
        let adj = acc
            .into_iter()
            .map(|mut list| {
                list.sort_unstable_by_key(|&(c, _)| c);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(list.len());
                for (c, w) in list {
                    match merged.last_mut() {
                        Some((last, sum)) if *last == c => *sum += w,
                        _ => merged.push((c, w)),
                    }
                }
                merged
            })
            .collect();
        CondensedGraph {
            adj,
            loops,
            strength,
            m: self.m,
        }
    }

    /// Greedy single-node moves until a full pass changes nothing.
    /// Returns dense community ids and whether anything moved.
    fn local_moving(&self, rng: &mut ChaCha8Rng, shuffle: bool) -> (Vec<usize>, bool) {
        let n = self.node_count();
        let two_m = 2.0 * self.m;
        let mut comm: Vec<usize> = (0..n).collect();
        let mut total = self.strength.clone();
        let mut weight_to = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut any_move = false;
        loop {
            if shuffle {
                order.shuffle(rng);
            }
            let mut moved = false;
            for &v in &order {
                let k = self.strength[v];
                let own = comm[v];
                for &(u, w) in &self.adj[v] {
                    let c = comm[u];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                total[own] -= k;
                let mut best = own;
                let mut best_gain = weight_to[own] - k * total[own] / two_m;
                for &c in &touched {
                    let gain = weight_to[c] - k * total[c] / two_m;
                    if gain > best_gain + 1e-12 * k.max(1e-300) {
                        best = c;
                        best_gain = gain;
                    }
                }
                total[best] += k;
                if best != own {
                    comm[v] = best;
                    moved = true;
                    any_move = true;
                }
                for &c in &touched {
                    weight_to[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (Partition::new(comm).compact().into_labels(), any_move)
    }
}

/// Runs the Louvain method for modularity.
pub fn louvain(g: &Graph, cfg: &LouvainConfig) -> Result<LouvainResult> {
    if !(cfg.tolerance >= 0.0) {
        return Err(Error::Validation(format!(
            "tolerance must be >= 0, got {}",
            cfg.tolerance
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.total_weight() <= 0.0 {
        // no edges: nothing to gain, keep the trivial partition
        return Ok(LouvainResult {
            partition: Partition::single(n),
            score: 0.0,
            levels: Vec::new(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut level = CondensedGraph::from_graph(g);
    let mut assignment: Vec<usize> = vec![0; n];
    let mut best_q = level.modularity(&assignment);
    let mut current: Vec<usize> = (0..n).collect();
    let mut levels = Vec::new();
    loop {
        let (comm, moved) = level.local_moving(&mut rng, cfg.shuffle);
        if !moved {
            break;
        }
        let expanded: Vec<usize> = current.iter().map(|&c| comm[c]).collect();
        let q = level.modularity(&comm);
        levels.push(q);
        let improved = q - best_q;
        if improved > 0.0 {
            assignment = expanded.clone();
            best_q = q;
        }
        if improved < cfg.tolerance {
            break;
        }
        level = level.aggregate(&comm);
        current = expanded;
    }
    let partition = Partition::new(assignment).compact();
    let score = crate::objective::modularity(g, &partition)?;
    Ok(LouvainResult {
        partition,
        score,
        levels,
    })
}
