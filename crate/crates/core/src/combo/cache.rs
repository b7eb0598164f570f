use serde::Serialize;

use crate::error::{Error, Result};

/// Destination of a redistribution: an existing community or a fresh one.
///
/// The derived order puts every existing community before `New`, which is
/// the tie-break order used by [`GainCache::best`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Dest {
    Existing(usize),
    New,
}

impl Dest {
    pub fn existing(self) -> Option<usize> {
        match self {
            Dest::Existing(d) => Some(d),
            Dest::New => None,
        }
    }
}

impl std::fmt::Display for Dest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dest::Existing(d) => write!(f, "{d}"),
            Dest::New => f.write_str("new"),
        }
    }
}

/// Best known redistribution for one (origin, destination) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub gain: f64,
    /// Origin nodes to move, ascending.
    pub nodes: Vec<usize>,
    /// Seed the entry was computed with, so it can be recomputed verbatim.
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
struct CacheRow {
    to_existing: Vec<Option<CacheEntry>>,
    to_new: Option<CacheEntry>,
}

/// The maximal-gain entry of a [`GainCache`].
#[derive(Debug, Clone, PartialEq)]
pub struct BestMove {
    pub origin: usize,
    pub dest: Dest,
    pub gain: f64,
    pub nodes: Vec<usize>,
}

/// Remembered redistributions for every ordered community pair.
#[derive(Debug, Clone, Default)]
pub struct GainCache {
    rows: Vec<CacheRow>,
}

impl GainCache {
    pub fn with_communities(k: usize) -> Self {
        let mut cache = GainCache::default();
        for _ in 0..k {
            cache.add_community();
        }
        cache
    }

    pub fn communities(&self) -> usize {
        self.rows.len()
    }

    /// Appends an empty row and column; returns the new community id.
    pub fn add_community(&mut self) -> usize {
        for row in &mut self.rows {
            row.to_existing.push(None);
        }
        let k = self.rows.len() + 1;
        self.rows.push(CacheRow {
            to_existing: vec![None; k],
            to_new: None,
        });
        k - 1
    }

    /// Drops row and column `c`; later ids shift down by one.
    pub fn remove_community(&mut self, c: usize) {
        self.rows.remove(c);
        for row in &mut self.rows {
            row.to_existing.remove(c);
        }
    }

    pub fn get(&self, origin: usize, dest: Dest) -> Option<&CacheEntry> {
        let row = self.rows.get(origin)?;
        match dest {
            Dest::Existing(d) => row.to_existing.get(d)?.as_ref(),
            Dest::New => row.to_new.as_ref(),
        }
    }

    pub fn set(&mut self, origin: usize, dest: Dest, entry: Option<CacheEntry>) {
        debug_assert!(dest != Dest::Existing(origin));
        let row = &mut self.rows[origin];
        match dest {
            Dest::Existing(d) => row.to_existing[d] = entry,
            Dest::New => row.to_new = entry,
        }
    }

    pub fn clear_new_column(&mut self) {
        for row in &mut self.rows {
            row.to_new = None;
        }
    }

    /// All populated entries in (origin, destination) order, `New` last.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Dest, &CacheEntry)> + '_ {
        self.rows.iter().enumerate().flat_map(|(o, row)| {
            row.to_existing
                .iter()
                .enumerate()
                .filter_map(move |(d, e)| e.as_ref().map(|e| (o, Dest::Existing(d), e)))
                .chain(row.to_new.as_ref().map(|e| (o, Dest::New, e)))
        })
    }

    pub(crate) fn entries_mut(
        &mut self,
    ) -> impl Iterator<Item = (usize, Dest, &mut CacheEntry)> + '_ {
        self.rows.iter_mut().enumerate().flat_map(|(o, row)| {
            row.to_existing
                .iter_mut()
                .enumerate()
                .filter_map(move |(d, e)| e.as_mut().map(|e| (o, Dest::Existing(d), e)))
                .chain(row.to_new.as_mut().map(|e| (o, Dest::New, e)))
        })
    }

    /// Entry with the largest gain. Ties go to the lower origin, then the
    /// lower destination, with a new community last.
    pub fn best(&self) -> Result<BestMove> {
        let mut best: Option<(usize, Dest, &CacheEntry)> = None;
        for (o, d, e) in self.entries() {
            if best.is_none_or(|(_, _, b)| e.gain > b.gain) {
                best = Some((o, d, e));
            }
        }
        let (origin, dest, e) = best.ok_or(Error::EmptyCache)?;
        Ok(BestMove {
            origin,
            dest,
            gain: e.gain,
            nodes: e.nodes.clone(),
        })
    }
}
