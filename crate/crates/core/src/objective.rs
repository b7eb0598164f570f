//! Objective functions: modularity and the map-equation code length.
//!
//! Both objectives are functions of two statistics per community, its total
//! strength `S_c` and its internal weight `W_c` (self-loops counted once).
//! [`ObjectiveState`] keeps those statistics up to date under single-node
//! moves so that a move gain costs `O(deg(v))`.
//!
//! Gains are oriented so that positive means better: `Q_after - Q_before`
//! for modularity and `L_before - L_after` for code length.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Modularity,
    #[serde(alias = "code_length", alias = "code-length")]
    CodeLength,
}

impl ObjectiveKind {
    /// True when larger scores are better.
    pub fn maximizes(self) -> bool {
        matches!(self, ObjectiveKind::Modularity)
    }

    /// Converts a raw score into "higher is better" orientation.
    pub fn oriented(self, score: f64) -> f64 {
        if self.maximizes() {
            score
        } else {
            -score
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveKind::Modularity => f.write_str("modularity"),
            ObjectiveKind::CodeLength => f.write_str("codelength"),
        }
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "modularity" => Ok(ObjectiveKind::Modularity),
            "codelength" | "code_length" | "code-length" => Ok(ObjectiveKind::CodeLength),
            other => Err(Error::Validation(format!("unknown objective {other:?}"))),
        }
    }
}

/// Total strength and internal weight of one community.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CommunityStats {
    pub strength: f64,
    pub internal: f64,
}

impl CommunityStats {
    pub fn is_empty(&self) -> bool {
        self.strength == 0.0 && self.internal == 0.0
    }
}

#[inline]
pub(crate) fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Graph-level constants an objective needs besides community statistics.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scale {
    pub kind: ObjectiveKind,
    pub m: f64,
    pub two_m: f64,
}

impl Scale {
    pub fn new(kind: ObjectiveKind, g: &Graph) -> Self {
        // summed in node order, like community strengths, so a single
        // community scores exactly 0 (modularity) and H(p) (code length)
        let two_m = g.strengths().iter().sum();
        Scale {
            kind,
            m: g.total_weight(),
            two_m,
        }
    }

    #[inline]
    pub fn exit_flow(&self, c: CommunityStats) -> f64 {
        let q = (c.strength - 2.0 * c.internal) / self.two_m;
        // a real boundary carries at least one edge weight; smaller is round-off
        if q < 1e-12 {
            0.0
        } else {
            q
        }
    }

    /// Oriented contribution of two communities, given the summed exit flow
    /// of all other communities. Terms not involving the pair are dropped.
    #[inline]
    pub fn pair_value(&self, a: CommunityStats, b: CommunityStats, exit_rest: f64) -> f64 {
        match self.kind {
            ObjectiveKind::Modularity => {
                (a.internal + b.internal) / self.m
                    - (a.strength * a.strength + b.strength * b.strength)
                        / (self.two_m * self.two_m)
            }
            ObjectiveKind::CodeLength => {
                let qa = self.exit_flow(a);
                let qb = self.exit_flow(b);
                let pa = a.strength / self.two_m;
                let pb = b.strength / self.two_m;
                -(plogp(exit_rest + qa + qb) - 2.0 * plogp(qa) - 2.0 * plogp(qb)
                    + plogp(qa + pa)
                    + plogp(qb + pb))
            }
        }
    }
}

/// Per-community sufficient statistics maintained under node moves.
#[derive(Debug, Clone)]
pub struct ObjectiveState {
    scale: Scale,
    stats: Vec<CommunityStats>,
    exit_total: f64,
    node_entropy: f64,
}

impl ObjectiveState {
    /// Builds statistics for `labels`; communities are `0..=max(labels)`.
    pub fn new(g: &Graph, labels: &[usize], kind: ObjectiveKind) -> Result<Self> {
        if g.node_count() == 0 || g.total_weight() <= 0.0 {
            return Err(Error::EmptyGraph);
        }
        if labels.len() != g.node_count() {
            return Err(Error::SizeMismatch {
                left: labels.len(),
                right: g.node_count(),
            });
        }
        let scale = Scale::new(kind, g);
        let node_entropy = -g
            .strengths()
            .iter()
            .map(|&s| plogp(s / scale.two_m))
            .sum::<f64>();
        let mut state = ObjectiveState {
            scale,
            stats: Vec::new(),
            exit_total: 0.0,
            node_entropy,
        };
        state.rebuild(g, labels);
        Ok(state)
    }

    /// Recomputes every statistic from scratch.
    pub fn rebuild(&mut self, g: &Graph, labels: &[usize]) {
        let k = labels.iter().copied().max().map_or(0, |c| c + 1);
        let mut stats = vec![CommunityStats::default(); k.max(self.stats.len())];
        for v in 0..g.node_count() {
            stats[labels[v]].strength += g.strength(v);
        }
        for &(u, v, w) in g.edges() {
            if labels[u] == labels[v] {
                stats[labels[u]].internal += w;
            }
        }
        self.stats = stats;
        self.exit_total = self.stats.iter().map(|&c| self.scale.exit_flow(c)).sum();
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.scale.kind
    }

    pub(crate) fn scale(&self) -> Scale {
        self.scale
    }

    /// Number of community slots, empty ones included.
    pub fn slots(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self, c: usize) -> CommunityStats {
        self.stats.get(c).copied().unwrap_or_default()
    }

    /// Summed exit probability `q` over all communities.
    pub fn exit_total(&self) -> f64 {
        self.exit_total
    }

    pub fn exit_flow(&self, c: usize) -> f64 {
        self.scale.exit_flow(self.stats(c))
    }

    /// Visit rate `Σ_{i∈c} p_i` of community `c`.
    pub fn visit_rate(&self, c: usize) -> f64 {
        self.stats(c).strength / self.scale.two_m
    }

    /// Objective value implied by the maintained statistics.
    pub fn score(&self) -> f64 {
        let s = &self.scale;
        match s.kind {
            ObjectiveKind::Modularity => self
                .stats
                .iter()
                .map(|c| c.internal / s.m - (c.strength / s.two_m).powi(2))
                .sum(),
            ObjectiveKind::CodeLength => {
                let exit: f64 = self.stats.iter().map(|&c| s.exit_flow(c)).sum();
                let mut l = plogp(exit) + self.node_entropy;
                for &c in &self.stats {
                    let q = s.exit_flow(c);
                    l += -2.0 * plogp(q) + plogp(q + c.strength / s.two_m);
                }
                l
            }
        }
    }

    /// Weights from `v` to communities `from` and `to`, self-loop excluded.
    fn split_weights(g: &Graph, labels: &[usize], v: usize, from: usize, to: usize) -> (f64, f64) {
        let (mut w_from, mut w_to) = (0.0, 0.0);
        for (u, w) in g.neighbors(v) {
            let c = labels[u];
            if c == from {
                w_from += w;
            } else if c == to {
                w_to += w;
            }
        }
        (w_from, w_to)
    }

    fn moved(
        &self,
        g: &Graph,
        labels: &[usize],
        v: usize,
        from: usize,
        to: usize,
    ) -> (CommunityStats, CommunityStats) {
        let (w_from, w_to) = Self::split_weights(g, labels, v, from, to);
        let k = g.strength(v);
        let loop_w = g.self_loop(v);
        let a = self.stats(from);
        let b = self.stats(to);
        (
            CommunityStats {
                strength: a.strength - k,
                internal: a.internal - loop_w - w_from,
            },
            CommunityStats {
                strength: b.strength + k,
                internal: b.internal + loop_w + w_to,
            },
        )
    }

    /// Gain of moving `v` from its current community to `to` (any slot
    /// index; an index past the last slot denotes a new empty community).
    pub fn move_gain(&self, g: &Graph, labels: &[usize], v: usize, to: usize) -> f64 {
        let from = labels[v];
        if from == to {
            return 0.0;
        }
        let a = self.stats(from);
        let b = self.stats(to);
        let (a2, b2) = self.moved(g, labels, v, from, to);
        let rest = match self.scale.kind {
            ObjectiveKind::Modularity => 0.0,
            ObjectiveKind::CodeLength => {
                (self.exit_total - self.scale.exit_flow(a) - self.scale.exit_flow(b)).max(0.0)
            }
        };
        self.scale.pair_value(a2, b2, rest) - self.scale.pair_value(a, b, rest)
    }

    /// Moves `v` to `to`, updating `labels` and the statistics.
    pub fn apply_move(&mut self, g: &Graph, labels: &mut [usize], v: usize, to: usize) {
        let from = labels[v];
        if from == to {
            return;
        }
        if to >= self.stats.len() {
            self.stats.resize(to + 1, CommunityStats::default());
        }
        let (a2, b2) = self.moved(g, labels, v, from, to);
        let s = self.scale;
        self.exit_total += s.exit_flow(a2) + s.exit_flow(b2)
            - s.exit_flow(self.stats[from])
            - s.exit_flow(self.stats[to]);
        self.stats[from] = a2;
        self.stats[to] = b2;
        if self.stats[from].strength.abs() < 1e-12 * s.two_m {
            // emptied community: drop accumulated round-off
            self.stats[from] = CommunityStats::default();
        }
        labels[v] = to;
    }

    /// Gain of moving the whole set `nodes` (all currently in one
    /// community) to `to`, computed by applying the single-node moves in
    /// order and reverting them. `labels` and the state are left unchanged.
    pub fn set_move_gain(
        &mut self,
        g: &Graph,
        labels: &mut [usize],
        nodes: &[usize],
        to: usize,
    ) -> f64 {
        let Some(&first) = nodes.first() else {
            return 0.0;
        };
        let from = labels[first];
        let slots = self.stats.len();
        let saved = (self.stats(from), self.stats(to), self.exit_total);
        let mut gain = 0.0;
        for &v in nodes {
            gain += self.move_gain(g, labels, v, to);
            self.apply_move(g, labels, v, to);
        }
        for &v in nodes.iter().rev() {
            labels[v] = from;
        }
        self.stats.truncate(slots.max(from + 1));
        if to < self.stats.len() {
            self.stats[to] = saved.1;
        }
        self.stats[from] = saved.0;
        self.exit_total = saved.2;
        gain
    }

    /// Removes an empty community slot, shifting later slots down by one.
    pub(crate) fn remove_slot(&mut self, c: usize) {
        self.stats.remove(c);
    }

    pub(crate) fn push_slot(&mut self) -> usize {
        self.stats.push(CommunityStats::default());
        self.stats.len() - 1
    }

    /// Drops trailing empty slots beyond `len`.
    pub(crate) fn truncate(&mut self, len: usize) {
        self.stats.truncate(len);
    }

    /// Largest relative deviation between this state and a fresh rebuild.
    pub fn drift_from_rebuild(&self, g: &Graph, labels: &[usize]) -> f64 {
        let mut fresh = self.clone();
        fresh.rebuild(g, labels);
        let scale = g.total_weight().max(1e-300);
        let mut worst = (fresh.exit_total - self.exit_total).abs();
        for c in 0..self.stats.len().max(fresh.stats.len()) {
            let x = self.stats(c);
            let y = fresh.stats(c);
            worst = worst
                .max((x.strength - y.strength).abs() / scale)
                .max((x.internal - y.internal).abs() / scale);
        }
        worst
    }
}

fn check_inputs(g: &Graph, p: &Partition) -> Result<()> {
    if g.node_count() == 0 || g.total_weight() <= 0.0 {
        return Err(Error::EmptyGraph);
    }
    if p.len() != g.node_count() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: g.node_count(),
        });
    }
    Ok(())
}

/// `Q = Σ_c [W_c/m - (S_c/2m)^2]`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    check_inputs(g, p)?;
    Ok(ObjectiveState::new(g, &p.compact().into_labels(), ObjectiveKind::Modularity)?.score())
}

/// Map-equation description length in bits for undirected visit rates
/// `p_i = strength_i / 2m`.
pub fn codelength(g: &Graph, p: &Partition) -> Result<f64> {
    check_inputs(g, p)?;
    Ok(ObjectiveState::new(g, &p.compact().into_labels(), ObjectiveKind::CodeLength)?.score())
}

pub fn score(kind: ObjectiveKind, g: &Graph, p: &Partition) -> Result<f64> {
    match kind {
        ObjectiveKind::Modularity => modularity(g, p),
        ObjectiveKind::CodeLength => codelength(g, p),
    }
}

/// Largest graph accepted by [`brute_force_best`].
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Exhaustive search over all set partitions (restricted growth strings).
///
/// Returns the first optimum in enumeration order.
pub fn brute_force_best(g: &Graph, kind: ObjectiveKind) -> Result<(Partition, f64)> {
    let n = g.node_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n == 0 || g.total_weight() <= 0.0 {
        return Err(Error::EmptyGraph);
    }
    let mut labels = vec![0usize; n];
    // max label among labels[..i], per prefix
    let mut prefix_max = vec![0usize; n];
    let mut state = ObjectiveState::new(g, &labels, kind)?;
    let mut best_labels = labels.clone();
    let mut best = kind.oriented(state.score());
    loop {
        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok((Partition::new(best_labels), kind.oriented(best)));
            }
            if labels[i] <= prefix_max[i - 1] {
                labels[i] += 1;
                break;
            }
            labels[i] = 0;
            i -= 1;
        }
        for j in i..n {
            if j > i {
                labels[j] = 0;
            }
            prefix_max[j] = prefix_max[j - 1].max(labels[j]);
        }
        state.rebuild(g, &labels);
        state.truncate(prefix_max[n - 1] + 1);
        let value = kind.oriented(state.score());
        if value > best {
            best = value;
            best_labels.copy_from_slice(&labels);
        }
    }
}
