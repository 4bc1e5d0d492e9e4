//! Data matrices, partitions and gold standards.

use alloc::borrow::Cow;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// An n×m matrix of finite reals: n items (rows) by m features (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    m: usize,
    row_ids: Option<Vec<String>>,
    feature_ids: Option<Vec<String>>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Ids default to ordinals.
    pub fn new(values: Vec<f64>, n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!("need at least 2 rows, got {n}")));
        }
        if m < 1 {
            return Err(Error::Size("need at least 1 column".into()));
        }
        if values.len() != n * m {
            return Err(Error::Structure(format!(
                "{} values do not fill a {n}x{m} matrix",
                values.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value at row {}, column {}",
                p / m,
                p % m
            )));
        }
        Ok(DataMatrix { values, n, m, row_ids: None, feature_ids: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Structure(format!(
                "row {i} has {} columns, expected {m}",
                rows[i].len()
            )));
        }
        Self::new(rows.concat(), rows.len(), m)
    }

    pub fn with_row_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::Structure(format!("{} row ids for {} rows", ids.len(), self.n)));
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Structure(format!("duplicate row id {id:?}")));
            }
        }
        self.row_ids = Some(ids);
        Ok(self)
    }

    pub fn with_feature_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.m {
            return Err(Error::Structure(format!(
                "{} feature ids for {} columns",
                ids.len(),
                self.m
            )));
        }
        self.feature_ids = Some(ids);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Row-major values.
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn row_id(&self, i: usize) -> Cow<'_, str> {
        match &self.row_ids {
            Some(ids) => Cow::Borrowed(ids[i].as_str()),
            None => Cow::Owned(i.to_string()),
        }
    }

    pub fn feature_id(&self, j: usize) -> Cow<'_, str> {
        match &self.feature_ids {
            Some(ids) => Cow::Borrowed(ids[j].as_str()),
            None => Cow::Owned(j.to_string()),
        }
    }

    pub fn has_row_ids(&self) -> bool {
        self.row_ids.is_some()
    }

    pub fn has_feature_ids(&self) -> bool {
        self.feature_ids.is_some()
    }

    /// The sub-matrix of the listed rows, in order. Ids are not carried over.
    /// Rows may repeat (bootstrap samples).
    pub fn select_rows(&self, rows: &[usize]) -> Result<DataMatrix> {
        let mut values = Vec::with_capacity(rows.len() * self.m);
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        DataMatrix::new(values, rows.len(), self.m)
    }

    /// The matrix without column `skip`.
    pub fn drop_column(&self, skip: usize) -> Result<DataMatrix> {
        let mut values = Vec::with_capacity(self.n * (self.m - 1));
        for i in 0..self.n {
            for (j, &v) in self.row(i).iter().enumerate() {
                if j != skip {
                    values.push(v);
                }
            }
        }
        DataMatrix::new(values, self.n, self.m - 1)
    }

    pub fn transpose_values(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.n * self.m];
        for i in 0..self.n {
            for j in 0..self.m {
                t[j * self.n + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Assignment of n items to k non-empty clusters labelled `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let mut sizes = vec![0usize; k];
        for (i, &c) in assignment.iter().enumerate() {
            if c >= k {
                return Err(Error::Structure(format!("item {i} assigned to cluster {c} >= k={k}")));
            }
            sizes[c] += 1;
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Structure(format!("cluster {c} is empty")));
        }
        Ok(Partition { assignment, k })
    }

    /// Relabels arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = alloc::collections::BTreeMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Partition { assignment, k: map.len() }
    }

    pub(crate) fn from_raw(assignment: Vec<usize>, k: usize) -> Self {
        debug_assert!(Partition::new(assignment.clone(), k).is_ok());
        Partition { assignment, k }
    }

    pub fn single(n: usize) -> Self {
        Partition { assignment: vec![0; n], k: 1 }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { assignment: (0..n).collect(), k: n }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Members of each cluster, in increasing item order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Same partition with labels in order of first appearance.
    pub fn canonical(&self) -> Self {
        Partition::from_labels(&self.assignment)
    }

    /// True if both describe the same grouping, ignoring label names.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }

    /// Restriction to the given items (relabelled canonically).
    pub fn restrict(&self, items: &[usize]) -> Partition {
        let labels: Vec<usize> = items.iter().map(|&i| self.assignment[i]).collect();
        Partition::from_labels(&labels)
    }
}

/// A trusted reference partition with class labels `0..class_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldStandard(Partition);

impl GoldStandard {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |&x| x + 1);
        Partition::new(labels, k).map(GoldStandard)
    }

    pub fn labels(&self) -> &[usize] {
        self.0.labels()
    }

    pub fn class_count(&self) -> usize {
        self.0.k()
    }

    pub fn partition(&self) -> &Partition {
        &self.0
    }
}

/// Output of [`standardize_rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub matrix: DataMatrix,
    /// Rows with zero variance, mapped to all zeros.
    pub constant_rows: Vec<usize>,
}

/// Scales every row to mean 0 and sample standard deviation 1.
pub fn standardize_rows(d: &DataMatrix) -> Standardized {
    let m = d.m();
    let mut values = d.values().to_vec();
    let mut constant_rows = Vec::new();
    for i in 0..d.n() {
        let row = &mut values[i * m..(i + 1) * m];
        let mean = row.iter().sum::<f64>() / m as f64;
        let ss: f64 = row.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = if m > 1 { libm::sqrt(ss / (m - 1) as f64) } else { 0.0 };
        if sd == 0.0 {
            row.iter_mut().for_each(|v| *v = 0.0);
            constant_rows.push(i);
        } else {
            row.iter_mut().for_each(|v| *v = (*v - mean) / sd);
        }
    }
    if !constant_rows.is_empty() {
        log::warn!("{} constant rows mapped to zero", constant_rows.len());
    }
    let mut matrix = DataMatrix::new(values, d.n(), m).expect("same shape as input");
    matrix.row_ids = d.row_ids.clone();
    matrix.feature_ids = d.feature_ids.clone();
    Standardized { matrix, constant_rows }
}

/// Largest n for which [`stirling_partition_count`] is exact.
pub const STIRLING_MAX_N: u32 = 25;

/// Number of ways to partition n items into k non-empty clusters (Stirling
/// number of the second kind), by the alternating sum
/// (1/k!) Σᵢ (−1)^(k−i) C(k,i) iⁿ.
pub fn stirling_partition_count(n: u32, k: u32) -> Result<u128> {
    if n > STIRLING_MAX_N {
        return Err(Error::Overflow(format!("n={n} exceeds {STIRLING_MAX_N}")));
    }
    if k == 0 || n == 0 {
        return Err(Error::Parameter("n and k must be at least 1".into()));
    }
    if k > n {
        return Ok(0);
    }
    let overflow = || Error::Overflow(format!("S({n},{k})"));
    let mut sum: i128 = 0;
    let mut binom: i128 = 1;
    for i in 0..=k {
        if i > 0 {
            binom = binom * (k - i + 1) as i128 / i as i128;
        }
        let term = binom.checked_mul((i as i128).checked_pow(n).ok_or_else(overflow)?).ok_or_else(overflow)?;
        sum = if (k - i).is_multiple_of(2) { sum.checked_add(term) } else { sum.checked_sub(term) }
            .ok_or_else(overflow)?;
    }
    let fact: i128 = (1..=k as i128).product();
    Ok((sum / fact) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn standardize_hand_example() {
        let d = DataMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0]]).unwrap();
        let s = standardize_rows(&d);
        assert_eq!(s.matrix.row(0), &[-1.0, 0.0, 1.0]);
        assert_eq!(s.matrix.row(1), &[0.0, 0.0, 0.0]);
        assert_eq!(s.constant_rows, vec![1]);
    }

    #[test]
    fn standardize_idempotent() {
        let d = DataMatrix::from_rows(&[vec![0.3, -2.0, 7.5, 1.0], vec![4.0, 4.5, 1.0, 0.0]]).unwrap();
        let once = standardize_rows(&d).matrix;
        let twice = standardize_rows(&once).matrix;
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling_partition_count(4, 2).unwrap(), 7);
        assert_eq!(stirling_partition_count(9, 1).unwrap(), 1);
        assert_eq!(stirling_partition_count(9, 9).unwrap(), 1);
        assert_eq!(stirling_partition_count(3, 5).unwrap(), 0);
        assert!(matches!(stirling_partition_count(26, 3), Err(Error::Overflow(_))));
    }

    #[test]
    fn stirling_matches_recurrence_up_to_bound() {
        // S(n,k) = k S(n-1,k) + S(n-1,k-1)
        let mut prev = vec![1u128];
        for n in 1..=STIRLING_MAX_N {
            let mut row = vec![0u128; n as usize + 1];
            for k in 1..=n as usize {
                let a = if k < prev.len() { k as u128 * prev[k] } else { 0 };
                row[k] = a + prev[k - 1];
            }
            for k in 1..=n {
                assert_eq!(stirling_partition_count(n, k).unwrap(), row[k as usize], "S({n},{k})");
            }
            prev = row;
        }
    }

    #[test]
    fn from_labels_is_canonical() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.k(), 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(DataMatrix::new(vec![1.0], 1, 1), Err(Error::Size(_))));
        assert!(matches!(DataMatrix::new(vec![1.0, f64::NAN], 2, 1), Err(Error::Domain(_))));
        assert!(Partition::new(vec![0, 2], 3).is_err());
        let d = DataMatrix::new(vec![1.0, 2.0], 2, 1).unwrap();
        assert!(d.with_row_ids(vec!["a".into(), "a".into()]).is_err());
    }
}
