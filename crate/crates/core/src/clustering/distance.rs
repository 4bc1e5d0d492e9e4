use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Symmetric n×n dissimilarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry (1e−12), a zero diagonal and non-negative entries.
    pub fn new(values: Vec<f64>, n: usize) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Structure(format!("{} entries for a {n}x{n} matrix", values.len())));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Domain(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if !(a >= 0.0 && a.is_finite()) || (a - b).abs() > 1e-12 {
                    return Err(Error::Domain(format!("entry ({i},{j}) not a symmetric finite distance")));
                }
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    /// Builds from the strict upper triangle, row by row.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix { n, values }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Pairwise Euclidean distances between the rows of `d`.
pub fn euclidean_distances(d: &DataMatrix) -> DistanceMatrix {
    DistanceMatrix::from_fn(d.n(), |i, j| libm::sqrt(sq_dist(d.row(i), d.row(j))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let d = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let s = euclidean_distances(&d);
        assert_eq!(s.get(0, 1), 5.0);
        assert_eq!(s.get(1, 1), 0.0);
    }
}
