//! Node-to-community assignments and partition similarity.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A community label per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(labels: Vec<usize>) -> Self {
        Partition { labels }
    }

    pub fn single(n: usize) -> Self {
        Partition { labels: vec![0; n] }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of distinct non-empty communities.
    pub fn community_count(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Relabels communities to `0..k` in order of first appearance.
    pub fn compact(&self) -> Partition {
        let mut map = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Partition { labels }
    }

    pub fn is_compact(&self) -> bool {
        let mut next = 0;
        for &c in &self.labels {
            if c == next {
                next += 1;
            } else if c > next {
                return false;
            }
        }
        true
    }

    /// Members of each community of the compacted partition.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let compact = self.compact();
        let k = compact.labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); k];
        for (v, &c) in compact.labels.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

impl From<Vec<usize>> for Partition {
    fn from(labels: Vec<usize>) -> Self {
        Partition::new(labels)
    }
}

fn n_log_n_ratio(count: f64, num: f64, den: f64) -> f64 {
    if count > 0.0 {
        count * (num / den).ln()
    } else {
        0.0
    }
}

/// Normalized mutual information between two partitions of the same node set.
///
/// `NMI = -2 Σ N_ab ln(N_ab N / (N_a N_b)) / (Σ N_a ln(N_a/N) + Σ N_b ln(N_b/N))`,
/// where `N_ab` counts nodes in community `a` of `p1` and `b` of `p2`.
/// Both-trivial partitions score 1.
pub fn nmi(p1: &Partition, p2: &Partition) -> Result<f64> {
    if p1.len() != p2.len() {
        return Err(Error::SizeMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    if p1.is_empty() {
        return Err(Error::Validation("nmi of empty partitions".into()));
    }
    let a = p1.compact();
    let b = p2.compact();
    let ka = a.labels.iter().max().unwrap() + 1;
    let kb = b.labels.iter().max().unwrap() + 1;

    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut row = vec![0usize; ka];
    let mut col = vec![0usize; kb];
    for (&x, &y) in a.labels.iter().zip(&b.labels) {
        *joint.entry((x, y)).or_insert(0) += 1;
        row[x] += 1;
        col[y] += 1;
    }
    let n = p1.len() as f64;

    let denom: f64 = row
        .iter()
        .map(|&c| n_log_n_ratio(c as f64, c as f64, n))
        .sum::<f64>()
        + col
            .iter()
            .map(|&c| n_log_n_ratio(c as f64, c as f64, n))
            .sum::<f64>();
    if denom == 0.0 {
        // both partitions put every node in one community
        return Ok(1.0);
    }
    let mut numer = 0.0;
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    for ((x, y), c) in cells {
        let c = c as f64;
        numer += n_log_n_ratio(c, c * n, row[x] as f64 * col[y] as f64);
    }
    let value = -2.0 * numer / denom;
    Ok(value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_examples() {
        assert_eq!(Partition::new(vec![5, 5, 9]).compact().labels(), &[0, 0, 1]);
        assert_eq!(Partition::new(vec![0, 1, 2]).compact().labels(), &[0, 1, 2]);
        let p = Partition::new(vec![3, 3, 3, 3]).compact();
        assert_eq!(p.labels(), &[0, 0, 0, 0]);
        assert_eq!(p.community_count(), 1);
    }

    #[test]
    fn compact_is_idempotent() {
        let p = Partition::new(vec![7, 2, 7, 4, 2]).compact();
        assert!(p.is_compact());
        assert_eq!(p.compact(), p);
        assert!(!Partition::new(vec![1, 0]).is_compact());
    }

    #[test]
    fn nmi_examples() {
        let p = Partition::new(vec![0, 0, 1, 1, 2]);
        assert!((nmi(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        let a = Partition::new(vec![0, 0, 1, 1]);
        let b = Partition::new(vec![1, 1, 0, 0]);
        assert!((nmi(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let c = Partition::new(vec![0, 1, 0, 1]);
        assert!(nmi(&a, &c).unwrap().abs() < 1e-12);
    }

    #[test]
    fn nmi_degenerate_cases() {
        let one = Partition::single(4);
        assert_eq!(nmi(&one, &one).unwrap(), 1.0);
        let split = Partition::new(vec![0, 0, 1, 1]);
        assert_eq!(nmi(&one, &split).unwrap(), 0.0);
        assert_eq!(nmi(&split, &one).unwrap(), 0.0);
    }

    #[test]
    fn nmi_size_mismatch() {
        let a = Partition::single(3);
        let b = Partition::single(4);
        assert!(matches!(nmi(&a, &b), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn communities_lists_members() {
        let p = Partition::new(vec![4, 1, 4, 1, 9]);
        assert_eq!(p.communities(), vec![vec![0, 2], vec![1, 3], vec![4]]);
    }
}
