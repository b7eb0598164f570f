//! Best redistribution of an origin community's nodes between the origin
//! and one destination community (existing or new).
//!
//! Only origin nodes switch sides; the destination's original members stay
//! put and enter through their aggregate statistics and the fixed weight
//! each origin node sends them.

use rand::Rng;

use crate::graph::Graph;
use crate::objective::{CommunityStats, ObjectiveKind, ObjectiveState, Scale};

/// Values closer than this are treated as equal when deciding whether a
/// refinement pass or a starting configuration improved anything.
pub(crate) const IMPROVEMENT_EPS: f64 = 1e-12;

/// One origin/destination pair, frozen at construction time.
#[derive(Debug, Clone)]
pub struct PairProblem {
    scale: Scale,
    nodes: Vec<usize>,
    strength: Vec<f64>,
    loops: Vec<f64>,
    to_dest: Vec<f64>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
    adj_w: Vec<f64>,
    origin: CommunityStats,
    dest: CommunityStats,
    dest_is_new: bool,
    exit_rest: f64,
}

/// Current side of every origin node plus the derived statistics.
#[derive(Debug, Clone)]
pub struct Split {
    on_dest: Vec<bool>,
    w_origin: Vec<f64>,
    w_dest: Vec<f64>,
    a: CommunityStats,
    b: CommunityStats,
}

impl Split {
    pub fn on_dest(&self) -> &[bool] {
        &self.on_dest
    }
}

/// Record of one Kernighan-Lin pass: every switched node with the gain
/// accumulated up to and including it, relative to the pass start.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftChain {
    pub steps: Vec<(usize, f64)>,
    /// Number of leading steps kept; `0` keeps the starting configuration.
    pub best_prefix: usize,
}

impl ShiftChain {
    pub fn best_gain(&self) -> f64 {
        match self.best_prefix {
            0 => 0.0,
            k => self.steps[k - 1].1,
        }
    }
}

/// Result of evaluating one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub gain: f64,
    /// Origin nodes (global ids, ascending) to move to the destination.
    pub moved: Vec<usize>,
}

impl PairOutcome {
    pub fn none() -> Self {
        PairOutcome {
            gain: 0.0,
            moved: Vec::new(),
        }
    }
}

impl PairProblem {
    /// `origin_nodes` must be the ascending member list of `labels`' community
    /// `origin`; `position[v]` is the index of `v` inside its own community's
    /// member list. `dest = None` means a new, empty community.
    pub fn new(
        g: &Graph,
        labels: &[usize],
        position: &[usize],
        state: &ObjectiveState,
        origin: usize,
        origin_nodes: &[usize],
        dest: Option<usize>,
    ) -> Self {
        let s = origin_nodes.len();
        let mut strength = Vec::with_capacity(s);
        let mut loops = Vec::with_capacity(s);
        let mut to_dest = vec![0.0; s];
        let mut offsets = Vec::with_capacity(s + 1);
        let mut adj = Vec::new();
        let mut adj_w = Vec::new();
        offsets.push(0);
        for (i, &v) in origin_nodes.iter().enumerate() {
            strength.push(g.strength(v));
            loops.push(g.self_loop(v));
            for (u, w) in g.neighbors(v) {
                let c = labels[u];
                if c == origin {
                    adj.push(position[u] as u32);
                    adj_w.push(w);
                } else if Some(c) == dest {
                    to_dest[i] += w;
                }
            }
            offsets.push(adj.len());
        }
        let scale = state.scale();
        let origin_stats = state.stats(origin);
        let dest_stats = dest.map(|d| state.stats(d)).unwrap_or_default();
        let exit_rest = match scale.kind {
            ObjectiveKind::Modularity => 0.0,
            ObjectiveKind::CodeLength => {
                (state.exit_total() - scale.exit_flow(origin_stats) - scale.exit_flow(dest_stats))
                    .max(0.0)
            }
        };
        PairProblem {
            scale,
            nodes: origin_nodes.to_vec(),
            strength,
            loops,
            to_dest,
            offsets,
            adj,
            adj_w,
            origin: origin_stats,
            dest: dest_stats,
            dest_is_new: dest.is_none(),
            exit_rest,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.adj[r.clone()]
            .iter()
            .map(|&j| j as usize)
            .zip(self.adj_w[r].iter().copied())
    }

    /// Builds the split with the given side assignment from scratch.
    pub fn split_from(&self, on_dest: Vec<bool>) -> Split {
        let s = self.len();
        assert_eq!(on_dest.len(), s);
        let mut split = Split {
            on_dest,
            w_origin: vec![0.0; s],
            w_dest: vec![0.0; s],
            a: CommunityStats::default(),
            b: CommunityStats::default(),
        };
        self.resync(&mut split);
        split
    }

    fn resync(&self, split: &mut Split) {
        let mut a = CommunityStats::default();
        let mut b = self.dest;
        for i in 0..self.len() {
            let (mut wo, mut wd) = (0.0, 0.0);
            for (j, w) in self.neighbors(i) {
                if split.on_dest[j] {
                    wd += w;
                } else {
                    wo += w;
                }
            }
            split.w_origin[i] = wo;
            split.w_dest[i] = wd;
            if split.on_dest[i] {
                b.strength += self.strength[i];
                b.internal += self.loops[i] + self.to_dest[i] + 0.5 * wd;
            } else {
                a.strength += self.strength[i];
                a.internal += self.loops[i] + 0.5 * wo;
            }
        }
        split.a = a;
        split.b = b;
    }

    /// Objective contribution of the pair under `split` (higher is better).
    pub fn value(&self, split: &Split) -> f64 {
        self.scale.pair_value(split.a, split.b, self.exit_rest)
    }

    /// Contribution of the untouched pair.
    pub fn base_value(&self) -> f64 {
        self.scale
            .pair_value(self.origin, self.dest, self.exit_rest)
    }

    /// Gain of `split` relative to the untouched pair.
    pub fn gain(&self, split: &Split) -> f64 {
        self.value(split) - self.base_value()
    }

    #[inline]
    fn switched(&self, split: &Split, i: usize) -> (CommunityStats, CommunityStats) {
        let k = self.strength[i];
        let l = self.loops[i];
        let (a, b) = (split.a, split.b);
        if split.on_dest[i] {
            (
                CommunityStats {
                    strength: a.strength + k,
                    internal: a.internal + l + split.w_origin[i],
                },
                CommunityStats {
                    strength: b.strength - k,
                    internal: b.internal - l - split.w_dest[i] - self.to_dest[i],
                },
            )
        } else {
            (
                CommunityStats {
                    strength: a.strength - k,
                    internal: a.internal - l - split.w_origin[i],
                },
                CommunityStats {
                    strength: b.strength + k,
                    internal: b.internal + l + split.w_dest[i] + self.to_dest[i],
                },
            )
        }
    }

    fn switch(&self, split: &mut Split, i: usize) {
        let (a, b) = self.switched(split, i);
        split.a = a;
        split.b = b;
        let to_dest = !split.on_dest[i];
        split.on_dest[i] = to_dest;
        for (j, w) in self.neighbors(i) {
            if to_dest {
                split.w_origin[j] -= w;
                split.w_dest[j] += w;
            } else {
                split.w_dest[j] -= w;
                split.w_origin[j] += w;
            }
        }
    }

    /// Switches every origin node exactly once, each time picking the
    /// available node with the largest gain (smallest loss), then keeps the
    /// best prefix of the chain. Ties go to the lowest node id.
    pub fn kernighan_lin_pass(&self, split: &mut Split) -> ShiftChain {
        let s = self.len();
        let start = self.value(split);
        let mut available: Vec<usize> = (0..s).collect();
        let mut chain = ShiftChain {
            steps: Vec::with_capacity(s),
            best_prefix: 0,
        };
        let mut order = Vec::with_capacity(s);
        let mut best_value = start;
        while !available.is_empty() {
            let mut pick = 0;
            let mut pick_value = f64::NEG_INFINITY;
            for (slot, &i) in available.iter().enumerate() {
                let (a, b) = self.switched(split, i);
                let v = self.scale.pair_value(a, b, self.exit_rest);
                if v > pick_value || (v == pick_value && i < available[pick]) {
                    pick_value = v;
                    pick = slot;
                }
            }
            let i = available.swap_remove(pick);
            self.switch(split, i);
            order.push(i);
            chain.steps.push((self.nodes[i], pick_value - start));
            if pick_value > best_value {
                best_value = pick_value;
                chain.best_prefix = order.len();
            }
        }
        for &i in order[chain.best_prefix..].iter().rev() {
            self.switch(split, i);
        }
        self.resync(split);
        chain
    }

    /// Repeats Kernighan-Lin passes while they improve the split; returns the
    /// final gain relative to the untouched pair.
    pub fn refine(&self, split: &mut Split) -> f64 {
        let mut current = self.value(split);
        loop {
            self.kernighan_lin_pass(split);
            let next = self.value(split);
            if next > current + IMPROVEMENT_EPS {
                current = next;
            } else {
                break;
            }
        }
        self.value(split) - self.base_value()
    }

    /// Refines the starting configurations (untouched pair, whole origin in
    /// the destination, `tries` fair-coin splits) and returns the best one.
    /// The gain is never negative: the untouched pair scores zero.
    pub fn best_redistribution<R: Rng>(&self, tries: usize, rng: &mut R) -> PairOutcome {
        let s = self.len();
        let mut best = PairOutcome::none();
        if s == 0 {
            return best;
        }
        let mut starts = vec![vec![false; s]];
        // with an empty destination, "everything moved" mirrors the untouched pair
        if !self.dest_is_new {
            starts.push(vec![true; s]);
        }
        for _ in 0..tries {
            starts.push((0..s).map(|_| rng.random::<bool>()).collect());
        }
        for start in starts {
            let mut split = self.split_from(start);
            let gain = self.refine(&mut split);
            if gain > best.gain + IMPROVEMENT_EPS {
                let moved: Vec<usize> = split
                    .on_dest
                    .iter()
                    .zip(&self.nodes)
                    .filter_map(|(&d, &v)| d.then_some(v))
                    .collect();
                best = PairOutcome { gain, moved };
            }
        }
        if best.moved.is_empty() {
            best.gain = 0.0;
        }
        best
    }
}
