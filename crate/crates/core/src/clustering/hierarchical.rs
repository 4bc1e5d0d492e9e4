use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::distance::DistanceMatrix;
use crate::data::Partition;
use crate::error::{Error, Result};

/// Inter-cluster distance used by the agglomerative procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linkage {
    /// Mean pairwise distance.
    Average,
    /// Maximum pairwise distance.
    Complete,
    /// Minimum pairwise distance.
    Single,
}

/// One agglomeration step. Leaves are nodes `0..n`; step s creates node `n+s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// The n−1 merges of an agglomerative run.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Validates that `merges` form a binary tree over `n` leaves.
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        if n < 1 || merges.len() != n - 1 {
            return Err(Error::Structure(format!("{} merges for {n} leaves", merges.len())));
        }
        let mut used = vec![false; 2 * n - 1];
        for (s, m) in merges.iter().enumerate() {
            for node in [m.left, m.right] {
                if node >= n + s || used[node] {
                    return Err(Error::Structure(format!("merge {s} uses invalid node {node}")));
                }
                used[node] = true;
            }
            if m.left == m.right || !m.height.is_finite() {
                return Err(Error::Structure(format!("merge {s} is malformed")));
            }
        }
        Ok(Dendrogram { n, merges })
    }

    pub fn leaves(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }
}

/// Agglomerative clustering of a distance matrix.
///
/// Each step merges the closest pair of active clusters; ties go to the
/// lowest (row, column) slot pair, where the merged cluster keeps the lower
/// slot. Distances are updated by the Lance–Williams formulas.
pub fn build_dendrogram(s: &DistanceMatrix, linkage: Linkage) -> Dendrogram {
    let n = s.n();
    let mut d = s.values().to_vec();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node = (0..n).collect::<Vec<_>>();
    let mut nn = vec![usize::MAX; n];
    let mut nn_d = vec![f64::INFINITY; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    let scan = |d: &[f64], active: &[bool], i: usize| -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for j in i + 1..n {
            if active[j] && d[i * n + j] < best.1 {
                best = (j, d[i * n + j]);
            }
        }
        best
    };
    for i in 0..n {
        (nn[i], nn_d[i]) = scan(&d, &active, i);
    }

    for step in 0..n.saturating_sub(1) {
        let mut a = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if active[i] && nn[i] != usize::MAX && (a == usize::MAX || nn_d[i] < best) {
                a = i;
                best = nn_d[i];
            }
        }
        let b = nn[a];
        let (na, nb) = (node[a], node[b]);
        merges.push(Merge { left: na.min(nb), right: na.max(nb), height: best });

        let (sa, sb) = (size[a] as f64, size[b] as f64);
        active[b] = false;
        for j in 0..n {
            if !active[j] || j == a {
                continue;
            }
            let (x, y) = (d[a * n + j], d[b * n + j]);
            let v = match linkage {
                Linkage::Single => x.min(y),
                Linkage::Complete => x.max(y),
                Linkage::Average => (sa * x + sb * y) / (sa + sb),
            };
            d[a * n + j] = v;
            d[j * n + a] = v;
        }
        size[a] += size[b];
        node[a] = n + step;

        (nn[a], nn_d[a]) = scan(&d, &active, a);
        for i in 0..a {
            if !active[i] {
                continue;
            }
            let v = d[i * n + a];
            if nn[i] == a || nn[i] == b {
                if v <= nn_d[i] && nn[i] == a {
                    nn_d[i] = v;
                } else {
                    (nn[i], nn_d[i]) = scan(&d, &active, i);
                }
            } else if v < nn_d[i] || (v == nn_d[i] && a < nn[i]) {
                nn[i] = a;
                nn_d[i] = v;
            }
        }
        for i in a + 1..b {
            if active[i] && nn[i] == b {
                (nn[i], nn_d[i]) = scan(&d, &active, i);
            }
        }
    }
    Dendrogram { n, merges }
}

/// The partition obtained by stopping after n−k merges.
pub fn cut_dendrogram(dend: &Dendrogram, k: usize) -> Result<Partition> {
    let n = dend.n;
    if k < 1 || k > n {
        return Err(Error::Parameter(format!("k={k} outside [1, {n}]")));
    }
    let used = n - k;
    let total = n + used;
    let mut parent = vec![usize::MAX; total];
    for (s, m) in dend.merges[..used].iter().enumerate() {
        parent[m.left] = n + s;
        parent[m.right] = n + s;
    }
    let mut comp = vec![0usize; total];
    let mut next = 0;
    for v in (0..total).rev() {
        comp[v] = if parent[v] == usize::MAX {
            next += 1;
            next - 1
        } else {
            comp[parent[v]]
        };
    }
    let p = Partition::from_labels(&comp[..n]);
    debug_assert_eq!(p.k(), k);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::euclidean_distances;
    use crate::data::DataMatrix;

    fn line(xs: &[f64]) -> DistanceMatrix {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        euclidean_distances(&DataMatrix::from_rows(&rows).unwrap())
    }

    #[test]
    fn two_items_single_merge() {
        for l in [Linkage::Average, Linkage::Complete, Linkage::Single] {
            let dend = build_dendrogram(&line(&[0.0, 2.5]), l);
            assert_eq!(dend.merges(), &[Merge { left: 0, right: 1, height: 2.5 }]);
        }
    }

    #[test]
    fn colinear_single_linkage_trace() {
        let dend = build_dendrogram(&line(&[0.0, 1.0, 10.0, 11.0]), Linkage::Single);
        let h: Vec<f64> = dend.merges().iter().map(|m| m.height).collect();
        assert_eq!(h, vec![1.0, 1.0, 9.0]);
        assert_eq!((dend.merges()[0].left, dend.merges()[0].right), (0, 1));
        assert_eq!((dend.merges()[1].left, dend.merges()[1].right), (2, 3));
        assert_eq!(cut_dendrogram(&dend, 2).unwrap().labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn average_linkage_heights() {
        // {0,1} at 1, then {0,1} vs 3: mean(3,2)=2.5 ; vs 10: mean(10,9)=9.5
        let dend = build_dendrogram(&line(&[0.0, 1.0, 3.0, 10.0]), Linkage::Average);
        let h: Vec<f64> = dend.merges().iter().map(|m| m.height).collect();
        assert_eq!(h, vec![1.0, 2.5, (10.0 + 9.0 + 7.0) / 3.0]);
        let dend = build_dendrogram(&line(&[0.0, 1.0, 3.0, 10.0]), Linkage::Complete);
        let h: Vec<f64> = dend.merges().iter().map(|m| m.height).collect();
        assert_eq!(h, vec![1.0, 3.0, 10.0]);
    }

    #[test]
    fn ties_go_to_lowest_pair() {
        // all distances equal: merges (0,1), then (node4 = {0,1}, 2) ...
        let s = DistanceMatrix::from_fn(4, |_, _| 1.0);
        let dend = build_dendrogram(&s, Linkage::Single);
        let pairs: Vec<(usize, usize)> = dend.merges().iter().map(|m| (m.left, m.right)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 4), (3, 5)]);
    }

    #[test]
    fn cut_bounds() {
        let dend = build_dendrogram(&line(&[0.0, 1.0, 3.0]), Linkage::Average);
        assert_eq!(cut_dendrogram(&dend, 3).unwrap(), Partition::singletons(3));
        assert_eq!(cut_dendrogram(&dend, 1).unwrap(), Partition::single(3));
        assert!(cut_dendrogram(&dend, 0).is_err());
        assert!(cut_dendrogram(&dend, 4).is_err());
    }
}
