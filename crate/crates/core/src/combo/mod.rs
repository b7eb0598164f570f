//! Combo: greedy search over mergers, splits and recombinations.
//!
//! Starting from a single community (or a supplied partition), every ordered
//! pair of communities, plus every community paired with a fresh empty one,
//! gets its best node redistribution computed by [`PairProblem`]. The single
//! best redistribution is applied, the pairs touching the two changed
//! communities are recomputed, and the loop continues while the best gain
//! exceeds the threshold.

mod cache;
mod pair;

use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::objective::{self, ObjectiveKind, ObjectiveState};
use crate::partition::Partition;

pub use cache::{BestMove, CacheEntry, Dest, GainCache};
pub use pair::{PairOutcome, PairProblem, ShiftChain, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComboConfig {
    pub objective: ObjectiveKind,
    /// Upper bound on the number of communities; `None` is unbounded.
    pub max_communities: Option<usize>,
    /// Moves must gain strictly more than this.
    pub threshold: f64,
    /// Random fair-coin starting splits per pair, on top of the two
    /// deterministic starts.
    pub tries: usize,
    pub seed: u64,
    pub max_sweeps: Option<usize>,
    /// Wall-clock budget; the best partition so far is returned when exceeded.
    pub time_limit_secs: Option<f64>,
    /// Evaluate pairs on the rayon pool. Output does not depend on this.
    pub parallel: bool,
    /// Cross-check state, scores and cache against recomputation after
    /// every move. Slow; meant for tests.
    pub verify: bool,
}

impl Default for ComboConfig {
    fn default() -> Self {
        ComboConfig {
            objective: ObjectiveKind::Modularity,
            max_communities: None,
            threshold: 1e-6,
            tries: 2,
            seed: 0,
            max_sweeps: None,
            time_limit_secs: None,
            parallel: true,
            verify: false,
        }
    }
}

impl ComboConfig {
    pub fn new(objective: ObjectiveKind) -> Self {
        ComboConfig {
            objective,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(Error::Validation(format!(
                "threshold must be >= 0, got {}",
                self.threshold
            )));
        }
        if self.max_communities == Some(0) {
            return Err(Error::Validation("max_communities must be positive".into()));
        }
        if let Some(t) = self.time_limit_secs {
            if !(t >= 0.0) {
                return Err(Error::Validation(format!(
                    "time limit must be >= 0, got {t}"
                )));
            }
        }
        Ok(())
    }

    fn room_for_new(&self, k: usize) -> bool {
        self.max_communities.is_none_or(|max| k < max)
    }
}

/// One accepted move.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub origin: usize,
    pub dest: String,
    pub moved: usize,
    pub gain: f64,
    pub score: f64,
    pub communities: usize,
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "sweep",
            "origin",
            "dest",
            "moved",
            "gain",
            "score",
            "communities",
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ComboResult {
    pub partition: Partition,
    /// Objective score of `partition`, recomputed from scratch.
    pub score: f64,
    pub trace: Vec<TraceRow>,
    pub timed_out: bool,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for evaluating `(origin, dest)` during `sweep`.
pub fn pair_seed(seed: u64, origin: usize, dest: Dest, sweep: usize) -> u64 {
    let d = match dest {
        Dest::Existing(d) => d as u64,
        Dest::New => u64::MAX,
    };
    splitmix(splitmix(splitmix(splitmix(seed) ^ origin as u64) ^ d) ^ sweep as u64)
}

/// Mutable search state: partition, objective statistics and gain cache.
pub struct ComboSearch<'g> {
    g: &'g Graph,
    cfg: ComboConfig,
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
    position: Vec<usize>,
    state: ObjectiveState,
    cache: GainCache,
    sweep: usize,
    trace: Vec<TraceRow>,
}

impl<'g> ComboSearch<'g> {
    /// Starts from `init`, or from a single community when `None`.
    pub fn new(g: &'g Graph, cfg: ComboConfig, init: Option<&Partition>) -> Result<Self> {
        cfg.validate()?;
        let n = g.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let labels = match init {
            Some(p) if p.len() != n => {
                return Err(Error::SizeMismatch {
                    left: p.len(),
                    right: n,
                })
            }
            Some(p) => p.compact().into_labels(),
            None => vec![0; n],
        };
        let k = labels.iter().max().unwrap() + 1;
        if let Some(max) = cfg.max_communities {
            if k > max {
                return Err(Error::Validation(format!(
                    "initial partition has {k} communities, limit is {max}"
                )));
            }
        }
        let state = ObjectiveState::new(g, &labels, cfg.objective)?;
        let mut members = vec![Vec::new(); k];
        let mut position = vec![0; n];
        for (v, &c) in labels.iter().enumerate() {
            position[v] = members[c].len();
            members[c].push(v);
        }
        let mut search = ComboSearch {
            g,
            cfg,
            labels,
            members,
            position,
            state,
            cache: GainCache::with_communities(k),
            sweep: 0,
            trace: Vec::new(),
        };
        let mut pairs = Vec::new();
        for o in 0..k {
            for d in 0..k {
                if d != o {
                    pairs.push((o, Dest::Existing(d)));
                }
            }
            if search.cfg.room_for_new(k) {
                pairs.push((o, Dest::New));
            }
        }
        search.recompute_pairs(&pairs);
        Ok(search)
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    pub fn config(&self) -> &ComboConfig {
        &self.cfg
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn partition(&self) -> Partition {
        Partition::new(self.labels.clone()).compact()
    }

    pub fn community_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn cache(&self) -> &GainCache {
        &self.cache
    }

    pub fn state(&self) -> &ObjectiveState {
        &self.state
    }

    /// Score implied by the maintained statistics.
    pub fn score(&self) -> f64 {
        self.state.score()
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn sweeps(&self) -> usize {
        self.sweep
    }

    /// Best redistribution of `origin`'s nodes into `dest` under the current
    /// partition. Returns zero gain without searching when `dest` is new and
    /// the community limit is reached.
    pub fn recalculate_gain(&self, origin: usize, dest: Dest, seed: u64) -> PairOutcome {
        if dest == Dest::New && !self.cfg.room_for_new(self.community_count()) {
            return PairOutcome::none();
        }
        let problem = PairProblem::new(
            self.g,
            &self.labels,
            &self.position,
            &self.state,
            origin,
            &self.members[origin],
            dest.existing(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        problem.best_redistribution(self.cfg.tries, &mut rng)
    }

    fn recompute_pairs(&mut self, pairs: &[(usize, Dest)]) {
        let sweep = self.sweep;
        let seed = self.cfg.seed;
        let eval = |&(o, d): &(usize, Dest)| {
            let s = pair_seed(seed, o, d, sweep);
            let out = self.recalculate_gain(o, d, s);
            CacheEntry {
                gain: out.gain,
                nodes: out.moved,
                seed: s,
            }
        };
        let entries: Vec<CacheEntry> = if self.cfg.parallel && pairs.len() > 1 {
            pairs.par_iter().map(eval).collect()
        } else {
            pairs.iter().map(eval).collect()
        };
        for (&(o, d), e) in pairs.iter().zip(entries) {
            self.cache.set(o, d, Some(e));
        }
    }

    pub fn best_gain(&self) -> Result<BestMove> {
        self.cache.best()
    }

    fn refresh_positions(&mut self, c: usize) {
        for (i, &v) in self.members[c].iter().enumerate() {
            self.position[v] = i;
        }
    }

    /// Moves `nodes` from `origin` to `dest`. An emptied origin is removed
    /// and later community ids shift down by one. Returns the post-move ids
    /// of origin (if it survived) and destination.
    pub fn perform_move(
        &mut self,
        origin: usize,
        dest: Dest,
        nodes: &[usize],
    ) -> Result<(Option<usize>, usize)> {
        let k = self.community_count();
        if origin >= k {
            return Err(Error::Inconsistent(format!(
                "origin {origin} out of range ({k} communities)"
            )));
        }
        if nodes.is_empty() {
            return Err(Error::Inconsistent("empty redistribution".into()));
        }
        for (i, &v) in nodes.iter().enumerate() {
            if v >= self.labels.len() || self.labels[v] != origin || (i > 0 && nodes[i - 1] >= v) {
                return Err(Error::Inconsistent(format!(
                    "stale redistribution: node {v} is not an (unlisted) member of community {origin}"
                )));
            }
        }
        let d = match dest {
            Dest::Existing(d) if d < k && d != origin => d,
            Dest::Existing(d) => {
                return Err(Error::Inconsistent(format!(
                    "invalid destination {d} for origin {origin}"
                )))
            }
            Dest::New => {
                if !self.cfg.room_for_new(k) {
                    return Err(Error::Inconsistent("community limit reached".into()));
                }
                self.state.push_slot();
                self.members.push(Vec::new());
                self.cache.add_community()
            }
        };
        for &v in nodes {
            self.state.apply_move(self.g, &mut self.labels, v, d);
        }
        let labels = &self.labels;
        self.members[origin].retain(|&v| labels[v] == origin);
        let mut merged = std::mem::take(&mut self.members[d]);
        merged.extend_from_slice(nodes);
        merged.sort_unstable();
        self.members[d] = merged;
        self.refresh_positions(origin);
        self.refresh_positions(d);

        if self.members[origin].is_empty() {
            for c in self.labels.iter_mut() {
                if *c > origin {
                    *c -= 1;
                }
            }
            self.state.remove_slot(origin);
            self.members.remove(origin);
            self.cache.remove_community(origin);
            let d = if d > origin { d - 1 } else { d };
            Ok((None, d))
        } else {
            Ok((Some(origin), d))
        }
    }

    /// Recomputes every pair touching the changed communities; re-scores the
    /// remaining entries when the objective couples all communities.
    fn refresh_cache(&mut self, changed: &[usize]) {
        let k = self.community_count();
        let room = self.cfg.room_for_new(k);
        let mut pairs = Vec::new();
        for &a in changed {
            for j in 0..k {
                if j != a {
                    pairs.push((a, Dest::Existing(j)));
                }
            }
            if room {
                pairs.push((a, Dest::New));
            }
        }
        for i in 0..k {
            if changed.contains(&i) {
                continue;
            }
            for &a in changed {
                pairs.push((i, Dest::Existing(a)));
            }
            if room && self.cache.get(i, Dest::New).is_none() {
                pairs.push((i, Dest::New));
            }
        }
        if !room {
            self.cache.clear_new_column();
        }

        if self.cfg.objective == ObjectiveKind::CodeLength {
            // the index codebook depends on the total exit flow, so entries
            // of untouched pairs shift whenever any community changes
            let slots = self.state.slots();
            let (g, labels, state) = (self.g, &mut self.labels, &mut self.state);
            for (o, d, e) in self.cache.entries_mut() {
                if changed.contains(&o) || d.existing().is_some_and(|d| changed.contains(&d)) {
                    continue;
                }
                let to = d.existing().unwrap_or(slots);
                e.gain = state.set_move_gain(g, labels, &e.nodes, to);
            }
        }
        self.recompute_pairs(&pairs);
    }

    /// Applies the best cached move if it beats the threshold.
    pub fn step(&mut self) -> Result<Option<TraceRow>> {
        let best = match self.cache.best() {
            Ok(b) => b,
            Err(Error::EmptyCache) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !(best.gain > self.cfg.threshold) {
            return Ok(None);
        }
        let before = self
            .cfg
            .verify
            .then(|| self.cfg.objective.oriented(self.state.score()));
        let (origin_after, dest_after) = self.perform_move(best.origin, best.dest, &best.nodes)?;
        self.sweep += 1;
        let mut changed: Vec<usize> = origin_after.into_iter().chain([dest_after]).collect();
        changed.sort_unstable();
        self.refresh_cache(&changed);

        let row = TraceRow {
            sweep: self.sweep,
            origin: best.origin,
            dest: best.dest.to_string(),
            moved: best.nodes.len(),
            gain: best.gain,
            score: self.state.score(),
            communities: self.community_count(),
        };
        if let Some(before) = before {
            self.verify(before, best.gain)?;
        }
        self.trace.push(row.clone());
        Ok(Some(row))
    }

    fn verify(&mut self, before: f64, gain: f64) -> Result<()> {
        let tol = |x: f64| 1e-9 * x.abs().max(1.0);
        let drift = self.state.drift_from_rebuild(self.g, &self.labels);
        if drift > 1e-9 {
            return Err(Error::Inconsistent(format!(
                "state drifted from rebuild by {drift:e}"
            )));
        }
        let kind = self.cfg.objective;
        let fresh = kind.oriented(objective::score(
            kind,
            self.g,
            &Partition::new(self.labels.clone()),
        )?);
        if (fresh - before - gain).abs() > tol(fresh) {
            return Err(Error::Inconsistent(format!(
                "accepted gain {gain} but score moved by {}",
                fresh - before
            )));
        }
        let slots = self.state.slots();
        let entries: Vec<(usize, Dest, CacheEntry)> = self
            .cache
            .entries()
            .map(|(o, d, e)| (o, d, e.clone()))
            .collect();
        for (o, d, e) in entries {
            if e.nodes.iter().any(|&v| self.labels[v] != o) {
                return Err(Error::Inconsistent(format!(
                    "entry ({o}, {d}) lists foreign nodes"
                )));
            }
            let to = d.existing().unwrap_or(slots);
            let replay = self
                .state
                .set_move_gain(self.g, &mut self.labels, &e.nodes, to);
            if (replay - e.gain).abs() > tol(e.gain) {
                return Err(Error::Inconsistent(format!(
                    "entry ({o}, {d}) caches {} but replays to {replay}",
                    e.gain
                )));
            }
            if kind == ObjectiveKind::Modularity {
                let again = self.recalculate_gain(o, d, e.seed);
                if (again.gain - e.gain).abs() > tol(e.gain) {
                    return Err(Error::Inconsistent(format!(
                        "entry ({o}, {d}) caches {} but recomputes to {}",
                        e.gain, again.gain
                    )));
                }
            }
        }
        Ok(())
    }

    /// Runs until no move beats the threshold or a limit is hit.
    pub fn run(mut self) -> Result<ComboResult> {
        let started = Instant::now();
        let budget = self.cfg.time_limit_secs.map(Duration::from_secs_f64);
        let mut timed_out = false;
        loop {
            if self.cfg.max_sweeps.is_some_and(|cap| self.sweep >= cap) {
                break;
            }
            if budget.is_some_and(|b| started.elapsed() > b) {
                timed_out = true;
                break;
            }
            if self.step()?.is_none() {
                break;
            }
        }
        let partition = self.partition();
        let score = objective::score(self.cfg.objective, self.g, &partition)?;
        Ok(ComboResult {
            partition,
            score,
            trace: self.trace,
            timed_out,
        })
    }
}

/// Optimizes from a single community.
pub fn optimize(g: &Graph, cfg: &ComboConfig) -> Result<ComboResult> {
    ComboSearch::new(g, cfg.clone(), None)?.run()
}

/// Optimizes starting from `init`; the result never scores worse.
pub fn optimize_from(g: &Graph, cfg: &ComboConfig, init: &Partition) -> Result<ComboResult> {
    ComboSearch::new(g, cfg.clone(), Some(init))?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bridged_triangles() -> Graph {
        Graph::from_unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
            .unwrap()
    }

    #[test]
    fn finds_the_two_triangles() {
        let g = bridged_triangles();
        for seed in 0..5 {
            let cfg = ComboConfig {
                seed,
                verify: true,
                ..Default::default()
            };
            let r = optimize(&g, &cfg).unwrap();
            assert_eq!(r.partition.labels(), &[0, 0, 0, 1, 1, 1]);
            assert!((r.score - 5.0 / 14.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_community_limit() {
        let g = bridged_triangles();
        let cfg = ComboConfig {
            max_communities: Some(1),
            ..Default::default()
        };
        let r = optimize(&g, &cfg).unwrap();
        assert_eq!(r.partition.community_count(), 1);
        assert_eq!(r.score, 0.0);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn merge_reduces_count_and_split_increases_it() {
        let g = bridged_triangles();
        let init = Partition::new(vec![0, 0, 0, 1, 1, 2]);
        let mut s = ComboSearch::new(&g, ComboConfig::default(), Some(&init)).unwrap();
        assert_eq!(
            s.perform_move(2, Dest::Existing(1), &[5]).unwrap(),
            (None, 1)
        );
        assert_eq!(s.community_count(), 2);
        assert_eq!(s.perform_move(1, Dest::New, &[4, 5]).unwrap(), (Some(1), 2));
        assert_eq!(s.community_count(), 3);
        assert_eq!(s.labels(), &[0, 0, 0, 1, 2, 2]);
        assert!(s.state().drift_from_rebuild(&g, s.labels()) < 1e-12);
    }

    #[test]
    fn stale_vector_is_rejected() {
        let g = bridged_triangles();
        let init = Partition::new(vec![0, 0, 0, 1, 1, 1]);
        let mut s = ComboSearch::new(&g, ComboConfig::default(), Some(&init)).unwrap();
        assert!(matches!(
            s.perform_move(0, Dest::Existing(1), &[3]),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(
            s.perform_move(0, Dest::Existing(1), &[]),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn rejects_init_over_limit() {
        let g = bridged_triangles();
        let cfg = ComboConfig {
            max_communities: Some(1),
            ..Default::default()
        };
        let init = Partition::new(vec![0, 0, 0, 1, 1, 1]);
        assert!(ComboSearch::new(&g, cfg, Some(&init)).is_err());
    }

    #[test]
    fn pair_seeds_differ() {
        let a = pair_seed(1, 0, Dest::New, 0);
        assert_ne!(a, pair_seed(1, 0, Dest::Existing(0), 0));
        assert_ne!(a, pair_seed(1, 0, Dest::New, 1));
        assert_ne!(a, pair_seed(2, 0, Dest::New, 0));
    }

    #[test]
    fn trace_csv_has_header() {
        let mut buf = Vec::new();
        write_trace(&[], &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("sweep,origin,dest"));
    }
}
