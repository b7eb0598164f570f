//! Planted-partition benchmark graphs with a known community assignment.
//!
//! Nodes are split into `k` near-equal communities. Each intra-community pair
//! is linked with probability `p_in = (1 - mu) d / (s_c - 1)` and each
//! cross-community pair with `p_out`, chosen so that a node's expected
//! degree is `d` and the expected fraction of its edges leaving its
//! community is `mu`. Afterwards every community is made internally
//! connected, then the whole graph is made connected.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub n: usize,
    pub k: usize,
    pub avg_degree: f64,
    pub mu: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedMeta {
    pub spec: PlantedSpec,
    pub edges: usize,
    pub intra_edges: usize,
    pub inter_edges: usize,
    /// Fraction of edges whose endpoints sit in different planted communities.
    pub realized_mu: f64,
    pub realized_avg_degree: f64,
    /// Edges added to make each community internally connected.
    pub intra_fix_edges: usize,
    /// Edges added between communities to make the graph connected.
    pub inter_fix_edges: usize,
    pub p_out: f64,
}

#[derive(Debug, Clone)]
pub struct Planted {
    pub graph: Graph,
    pub truth: Partition,
    pub meta: PlantedMeta,
}

impl PlantedSpec {
    pub fn new(n: usize, k: usize, avg_degree: f64, mu: f64, seed: u64) -> Self {
        PlantedSpec {
            n,
            k,
            avg_degree,
            mu,
            seed,
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let base = self.n / self.k.max(1);
        let extra = self.n % self.k.max(1);
        (0..self.k).map(|c| base + usize::from(c < extra)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n < self.k {
            return Err(Error::Infeasible(format!(
                "need n >= k >= 1, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if !(self.avg_degree >= 1.0) || !self.avg_degree.is_finite() {
            return Err(Error::Infeasible(format!(
                "avg_degree must be >= 1, got {}",
                self.avg_degree
            )));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(Error::Infeasible(format!(
                "mu must lie in [0, 1), got {}",
                self.mu
            )));
        }
        self.probabilities().map(|_| ())
    }

    /// Intra probability per community and the shared cross probability.
    fn probabilities(&self) -> Result<(Vec<f64>, f64)> {
        let sizes = self.sizes();
        let d_in = (1.0 - self.mu) * self.avg_degree;
        let d_out = self.mu * self.avg_degree;
        let mut p_in = Vec::with_capacity(sizes.len());
        for &s in &sizes {
            if s < 2 {
                return Err(Error::Infeasible(format!(
                    "a community of size {s} cannot host intra-community degree {d_in:.3}"
                )));
            }
            let p = d_in / (s - 1) as f64;
            if p > 1.0 {
                return Err(Error::Infeasible(format!(
                    "intra-community degree {d_in:.3} exceeds community size - 1 = {}",
                    s - 1
                )));
            }
            p_in.push(p);
        }
        let n = self.n as f64;
        let outside_pairs: f64 = sizes.iter().map(|&s| s as f64 * (n - s as f64)).sum();
        let p_out = if d_out == 0.0 {
            0.0
        } else if outside_pairs == 0.0 {
            return Err(Error::Infeasible(
                "mu > 0 needs at least two communities".into(),
            ));
        } else {
            d_out * n / outside_pairs
        };
        if p_out > 1.0 {
            return Err(Error::Infeasible(format!(
                "cross-community degree {d_out:.3} needs edge probability {p_out:.3} > 1"
            )));
        }
        Ok((p_in, p_out))
    }
}

/// Calls `emit(t)` for increasing indices `t < total`, each kept with
/// probability `p`, using geometric gaps.
fn bernoulli_indices<R: Rng>(total: u64, p: f64, rng: &mut R, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(emit);
        return;
    }
    let gap = Geometric::new(p).expect("probability in (0, 1)");
    let mut t = gap.sample(rng);
    while t < total {
        emit(t);
        t = t.saturating_add(1).saturating_add(gap.sample(rng));
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
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
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups `nodes` by component, components ordered by their lowest node.
fn groups(sets: &mut DisjointSets, nodes: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = std::collections::HashMap::new();
    for &v in nodes {
        let r = sets.find(v);
        let slot = *root_slot.entry(r).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[slot].push(v);
    }
    out
}

pub fn generate(spec: &PlantedSpec) -> Result<Planted> {
    spec.validate()?;
    let (p_in, p_out) = spec.probabilities()?;
    let sizes = spec.sizes();
    let mut starts = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in &sizes {
        starts.push(acc);
        acc += s;
    }
    let mut truth = Vec::with_capacity(spec.n);
    for (c, &s) in sizes.iter().enumerate() {
        truth.extend(std::iter::repeat_n(c, s));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for (c, &s) in sizes.iter().enumerate() {
        // upper triangle of the block, walked row by row
        let base = starts[c];
        let (mut row, mut row_start) = (0usize, 0u64);
        bernoulli_indices((s * (s - 1) / 2) as u64, p_in[c], &mut rng, |t| {
            while t >= row_start + (s - 1 - row) as u64 {
                row_start += (s - 1 - row) as u64;
                row += 1;
            }
            let col = row + 1 + (t - row_start) as usize;
            edges.push((base + row, base + col));
        });
    }
    for a in 0..sizes.len() {
        for b in a + 1..sizes.len() {
            let (sa, sb) = (starts[a], starts[b]);
            let width = sizes[b] as u64;
            bernoulli_indices(sizes[a] as u64 * width, p_out, &mut rng, |t| {
                edges.push((sa + (t / width) as usize, sb + (t % width) as usize));
            });
        }
    }

    let mut sets = DisjointSets::new(spec.n);
    for &(u, v) in &edges {
        sets.union(u, v);
    }
    let mut intra_fix_edges = 0;
    for (c, &s) in sizes.iter().enumerate() {
        let nodes: Vec<usize> = (starts[c]..starts[c] + s).collect();
        let comps = groups(&mut sets, &nodes);
        for pair in comps.windows(2) {
            let u = pair[0][rng.random_range(0..pair[0].len())];
            let v = pair[1][rng.random_range(0..pair[1].len())];
            edges.push((u, v));
            sets.union(u, v);
            intra_fix_edges += 1;
        }
    }
    let all: Vec<usize> = (0..spec.n).collect();
    let comps = groups(&mut sets, &all);
    let mut inter_fix_edges = 0;
    for pair in comps.windows(2) {
        let u = pair[0][rng.random_range(0..pair[0].len())];
        let v = pair[1][rng.random_range(0..pair[1].len())];
        edges.push((u, v));
        inter_fix_edges += 1;
    }

    let inter_edges = edges.iter().filter(|&&(u, v)| truth[u] != truth[v]).count();
    let total = edges.len();
    let graph = Graph::from_unweighted(spec.n, &edges)?;
    debug_assert_eq!(graph.edge_count(), total);
    let meta = PlantedMeta {
        spec: spec.clone(),
        edges: total,
        intra_edges: total - inter_edges,
        inter_edges,
        realized_mu: if total == 0 {
            0.0
        } else {
            inter_edges as f64 / total as f64
        },
        realized_avg_degree: 2.0 * total as f64 / spec.n as f64,
        intra_fix_edges,
        inter_fix_edges,
        p_out,
    };
    Ok(Planted {
        graph,
        truth: Partition::new(truth),
        meta,
    })
}
