//! Maximum-overlap relabeling of one partition onto another.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::Partition;
use crate::error::{Error, Result};

/// Result of [`max_overlap_matching`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `mapping[c]` is the label given to cluster c of the second partition.
    /// Labels `>= k1` mark clusters matched to padding.
    pub mapping: Vec<usize>,
    /// The second partition's labels after relabeling.
    pub relabeled: Vec<usize>,
    /// Items whose relabeled cluster equals their cluster in the first partition.
    pub overlap: usize,
}

/// Minimum-cost perfect assignment on a square matrix (Hungarian method).
/// Returns `assign[row] = column`.
pub fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Relabels `second` to maximize agreement with `first`. Cluster counts may
/// differ; the smaller side is padded with empty clusters.
pub fn max_overlap_matching(first: &Partition, second: &Partition) -> Result<Matching> {
    match_labels(first.labels(), first.k(), second.labels(), second.k())
}

pub(crate) fn match_labels(first: &[usize], k1: usize, second: &[usize], k2: usize) -> Result<Matching> {
    if first.len() != second.len() {
        return Err(Error::Structure("partitions cover different item counts".into()));
    }
    let size = k1.max(k2);
    let mut overlap = vec![vec![0i64; size]; size];
    for (&a, &b) in first.iter().zip(second) {
        overlap[b][a] += 1;
    }
    let cost: Vec<Vec<i64>> = overlap.iter().map(|r| r.iter().map(|&x| -x).collect()).collect();
    let assign = hungarian(&cost);
    let mapping: Vec<usize> = assign[..k2].to_vec();
    let total = (0..k2).map(|c| overlap[c][mapping[c]]).sum::<i64>() as usize;
    let relabeled = second.iter().map(|&b| mapping[b]).collect();
    Ok(Matching { mapping, relabeled, overlap: total })
}
