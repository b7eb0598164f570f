//! Independent reference implementations used as test oracles.
//!
//! Everything here works from a dense adjacency matrix and textbook
//! formulas, sharing no code with the library's incremental statistics.

#![allow(dead_code)]

use std::collections::HashMap;

use combo_core::Graph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense symmetric adjacency with `A[i][i] = 2 * loop weight`, so row sums
/// equal node strengths.
pub fn adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in g.edges() {
        if u == v {
            a[u][u] += 2.0 * w;
        } else {
            a[u][v] += w;
            a[v][u] += w;
        }
    }
    a
}

/// Q = (1/2m) Σ_ij [A_ij - k_i k_j / 2m] δ(c_i, c_j)
pub fn modularity_oracle(g: &Graph, labels: &[usize]) -> f64 {
    let a = adjacency(g);
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

fn entropy(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -(w / total) * (w / total).log2())
        .sum()
}

/// Two-level map equation written as codebook-weighted entropies:
/// L = q H(Q) + Σ_c (q_c + Σ_{i∈c} p_i) H(P_c).
pub fn codelength_oracle(g: &Graph, labels: &[usize]) -> f64 {
    let a = adjacency(g);
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let p: Vec<f64> = k.iter().map(|ki| ki / two_m).collect();
    let mut modules: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &c) in labels.iter().enumerate() {
        modules.entry(c).or_default().push(i);
    }
    let mut exits = Vec::new();
    let mut total = 0.0;
    for nodes in modules.values() {
        let mut q_c = 0.0;
        for &i in nodes {
            for j in 0..n {
                if labels[j] != labels[i] {
                    q_c += a[i][j] / two_m;
                }
            }
        }
        exits.push(q_c);
        let mut book = vec![q_c];
        book.extend(nodes.iter().map(|&i| p[i]));
        let rate: f64 = book.iter().sum();
        total += rate * entropy(&book);
    }
    let q: f64 = exits.iter().sum();
    total + q * entropy(&exits)
}

/// NMI from an explicit confusion matrix, natural log.
pub fn nmi_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut ra: HashMap<usize, f64> = HashMap::new();
    let mut rb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *ra.entry(x).or_default() += 1.0;
        *rb.entry(y).or_default() += 1.0;
    }
    let num: f64 = joint
        .iter()
        .map(|(&(x, y), &nab)| nab * (nab * n / (ra[&x] * rb[&y])).ln())
        .sum();
    let den: f64 = ra.values().map(|&c| c * (c / n).ln()).sum::<f64>()
        + rb.values().map(|&c| c * (c / n).ln()).sum::<f64>();
    if den == 0.0 {
        return 1.0;
    }
    -2.0 * num / den
}

pub fn bridged_triangles() -> Graph {
    Graph::from_unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
}

/// Random connected weighted graph: a random spanning tree plus extra edges.
pub fn random_connected(n: usize, extra: usize, weighted: bool, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| {
        if weighted {
            rng.random_range(0.5..3.0)
        } else {
            1.0
        }
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, weight(rng)));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.push((u, v, weight(rng)));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_labels(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weighted graph with at least one edge, possibly with self-loops
/// and repeated pairs.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let edge = (0..n, 0..n, 0.1f64..5.0);
        prop::collection::vec(edge, 1..(3 * n))
            .prop_map(move |edges| Graph::from_edges(n, &edges).unwrap())
    })
}

/// A graph together with a labelling of its nodes into at most `k` groups.
pub fn arb_graph_and_labels(max_n: usize, k: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    arb_graph(max_n).prop_flat_map(move |g| {
        let n = g.node_count();
        (Just(g), prop::collection::vec(0..k, n))
    })
}
