//! External agreement indices between two partitions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::Partition;
use crate::error::{Error, Result};

/// r×t cross-tabulation of two labelings with marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

/// Pair agreement counts: `a` together in both, `b` together only in the
/// first, `c` together only in the second, `d` apart in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

#[inline]
fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

impl ContingencyTable {
    /// Builds a table from explicit counts (rows: first labeling).
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let t = counts.first().map_or(0, Vec::len);
        if counts.iter().any(|r| r.len() != t) {
            return Err(Error::Structure("ragged contingency table".into()));
        }
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..t).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let n = row_sums.iter().sum();
        Ok(ContingencyTable { counts, row_sums, col_sums, n })
    }

    /// Cross-tabulates two labelings of the same items. Labels need not be
    /// consecutive; rows and columns follow increasing label value.
    pub fn from_labels(first: &[usize], second: &[usize]) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::Structure(format!(
                "labelings cover {} and {} items",
                first.len(),
                second.len()
            )));
        }
        let compact = |l: &[usize]| {
            let mut vals: Vec<usize> = l.to_vec();
            vals.sort_unstable();
            vals.dedup();
            let idx: Vec<usize> = l.iter().map(|x| vals.binary_search(x).unwrap()).collect();
            (idx, vals.len())
        };
        let (a, r) = compact(first);
        let (b, t) = compact(second);
        let mut counts = vec![vec![0u64; t]; r];
        for (&i, &j) in a.iter().zip(&b) {
            counts[i][j] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pair_counts(&self) -> PairCounts {
        let a: u64 = self.counts.iter().flatten().map(|&x| choose2(x)).sum();
        let rows: u64 = self.row_sums.iter().map(|&x| choose2(x)).sum();
        let cols: u64 = self.col_sums.iter().map(|&x| choose2(x)).sum();
        let b = rows - a;
        let c = cols - a;
        PairCounts { a, b, c, d: choose2(self.n) - a - b - c }
    }
}

/// Table of two partitions of the same items.
pub fn contingency(first: &Partition, second: &Partition) -> Result<ContingencyTable> {
    ContingencyTable::from_labels(first.labels(), second.labels())
}

fn need_pairs(t: &ContingencyTable) -> Result<()> {
    if t.n < 2 {
        return Err(Error::Size(format!("need at least 2 items, got {}", t.n)));
    }
    Ok(())
}

/// Fraction of item pairs on which the two partitions agree.
pub fn rand_index(t: &ContingencyTable) -> Result<f64> {
    need_pairs(t)?;
    let p = t.pair_counts();
    Ok((p.a + p.d) as f64 / p.total() as f64)
}

/// Rand index corrected for chance (hypergeometric null). Returns 0 with a
/// warning when the denominator vanishes.
pub fn adjusted_rand(t: &ContingencyTable) -> Result<f64> {
    need_pairs(t)?;
    let p = t.pair_counts();
    let rows = (p.a + p.b) as u128;
    let cols = (p.a + p.c) as u128;
    let total = p.total() as u128;
    // Scaled by `total` to stay in integers: index = (a·T − R·C) / ((R+C)·T/2 − R·C).
    let num = p.a as i128 * total as i128 - (rows * cols) as i128;
    let den2 = (rows + cols) as i128 * total as i128 - 2 * (rows * cols) as i128;
    if den2 == 0 {
        log::warn!("adjusted Rand index undefined (zero denominator); reporting 0");
        return Ok(0.0);
    }
    Ok(2.0 * num as f64 / den2 as f64)
}

/// Fowlkes–Mallows index T/√(U·V).
pub fn fm_index(t: &ContingencyTable) -> Result<f64> {
    need_pairs(t)?;
    let sq = |v: &mut dyn Iterator<Item = &u64>| v.map(|&x| x as u128 * x as u128).sum::<u128>();
    let n = t.n as u128;
    let tk = sq(&mut t.counts.iter().flatten()) - n;
    let uk = sq(&mut t.row_sums.iter()) - n;
    let vk = sq(&mut t.col_sums.iter()) - n;
    if uk == 0 || vk == 0 {
        return Err(Error::Numerical("Fowlkes-Mallows index undefined for an all-singleton partition".into()));
    }
    Ok(tk as f64 / libm::sqrt(uk as f64 * vk as f64))
}

/// F-index: class-size-weighted best F-measure of each row class against
/// the column clusters, with recall weight `b`.
pub fn f_index(t: &ContingencyTable, b: f64) -> Result<f64> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::Parameter(format!("F-index weight must be positive, got {b}")));
    }
    if t.n == 0 {
        return Err(Error::Size("empty contingency table".into()));
    }
    let b2 = b * b;
    let mut total = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        let mut best: f64 = 0.0;
        for (j, &nij) in row.iter().enumerate() {
            if nij == 0 {
                continue;
            }
            let prec = nij as f64 / t.col_sums[j] as f64;
            let rec = nij as f64 / t.row_sums[i] as f64;
            best = best.max((b2 + 1.0) * prec * rec / (b2 * prec + rec));
        }
        total += t.row_sums[i] as f64 / t.n as f64 * best;
    }
    Ok(total)
}

/// Selector for the external index used by stability methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExternalIndex {
    Rand,
    AdjustedRand,
    FowlkesMallows,
    /// F-index with b = 1.
    F,
}

impl ExternalIndex {
    pub fn compute(self, t: &ContingencyTable) -> Result<f64> {
        match self {
            ExternalIndex::Rand => rand_index(t),
            ExternalIndex::AdjustedRand => adjusted_rand(t),
            ExternalIndex::FowlkesMallows => fm_index(t),
            ExternalIndex::F => f_index(t, 1.0),
        }
    }

    pub fn between(self, first: &[usize], second: &[usize]) -> Result<f64> {
        self.compute(&ContingencyTable::from_labels(first, second)?)
    }

    pub fn name(self) -> &'static str {
        match self {
            ExternalIndex::Rand => "rand",
            ExternalIndex::AdjustedRand => "adjusted-rand",
            ExternalIndex::FowlkesMallows => "fm",
            ExternalIndex::F => "f",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rand" => ExternalIndex::Rand,
            "adjusted-rand" | "ari" => ExternalIndex::AdjustedRand,
            "fm" => ExternalIndex::FowlkesMallows,
            "f" => ExternalIndex::F,
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ContingencyTable {
        ContingencyTable::new(vec![
            vec![1, 4, 2, 1, 2],
            vec![0, 1, 1, 0, 1],
            vec![1, 2, 0, 2, 0],
            vec![2, 1, 0, 1, 2],
            vec![1, 0, 1, 0, 3],
        ])
        .unwrap()
    }

    #[test]
    fn example_table_marginals() {
        let t = example();
        assert_eq!(t.n(), 29);
        assert_eq!(t.row_sums(), &[10, 3, 5, 6, 5]);
    }

    #[test]
    fn example_table_values() {
        let t = example();
        assert!((rand_index(&t).unwrap() - 0.677).abs() <= 5e-4);
        // (15 − 83·78/406) / (161/2 − 83·78/406); the printed −0.014 is this value truncated.
        let expected = (15.0 - 83.0 * 78.0 / 406.0) / (80.5 - 83.0 * 78.0 / 406.0);
        assert!((adjusted_rand(&t).unwrap() - expected).abs() < 1e-12);
        assert!((fm_index(&t).unwrap() - 0.186).abs() <= 5e-4);
        assert!((f_index(&t, 1.0).unwrap() - 0.414).abs() <= 5e-4);
    }

    #[test]
    fn identical_partitions_score_one() {
        let a = [0, 0, 1, 1, 2, 2, 2];
        let b = [5, 5, 3, 3, 9, 9, 9];
        for idx in [ExternalIndex::Rand, ExternalIndex::AdjustedRand, ExternalIndex::FowlkesMallows, ExternalIndex::F] {
            assert_eq!(idx.between(&a, &b).unwrap(), 1.0, "{idx:?}");
        }
    }

    #[test]
    fn single_cluster_f_closed_form() {
        let a = [0, 0, 0, 1, 1, 2];
        let b = [0; 6];
        let t = ContingencyTable::from_labels(&a, &b).unwrap();
        let expect: f64 = [3.0, 2.0, 1.0]
            .iter()
            .map(|&s: &f64| {
                let p = s / 6.0;
                p * (2.0 * p * 1.0) / (p + 1.0)
            })
            .sum();
        assert!((f_index(&t, 1.0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn f_index_is_asymmetric() {
        let a = [0, 0, 0, 1, 1, 2];
        let b = [0, 0, 1, 1, 1, 1];
        let ab = f_index(&ContingencyTable::from_labels(&a, &b).unwrap(), 1.0).unwrap();
        let ba = f_index(&ContingencyTable::from_labels(&b, &a).unwrap(), 1.0).unwrap();
        assert!((ab - ba).abs() > 1e-3);
    }

    #[test]
    fn degenerate_cases() {
        let t = ContingencyTable::from_labels(&[0, 0, 0], &[0, 0, 0]).unwrap();
        assert_eq!(adjusted_rand(&t).unwrap(), 0.0);
        let t = ContingencyTable::from_labels(&[0, 1, 2], &[0, 1, 2]).unwrap();
        assert!(fm_index(&t).is_err());
        assert!(ContingencyTable::from_labels(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn large_n_does_not_overflow() {
        let n = 100_000usize;
        let a: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let b: Vec<usize> = (0..n).map(|i| i % 7).collect();
        let t = ContingencyTable::from_labels(&a, &b).unwrap();
        let p = t.pair_counts();
        assert_eq!(p.total(), (n as u64) * (n as u64 - 1) / 2);
        assert!(adjusted_rand(&t).unwrap().abs() < 1e-3);
    }
}
