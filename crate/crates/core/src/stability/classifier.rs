use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::clustering::sq_dist;
use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Nearest-centroid classifier: a diagonal linear discriminant with the
/// same variance for every feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    centroids: Vec<f64>,
    classes: usize,
    m: usize,
}

impl Classifier {
    /// Fits one centroid per class. Every class in `0..classes` needs a member.
    pub fn train(d: &DataMatrix, labels: &[usize], classes: usize) -> Result<Self> {
        if labels.len() != d.n() {
            return Err(Error::Structure(format!("{} labels for {} rows", labels.len(), d.n())));
        }
        let m = d.m();
        let mut centroids = vec![0.0; classes * m];
        let mut counts = vec![0usize; classes];
        for (i, &c) in labels.iter().enumerate() {
            if c >= classes {
                return Err(Error::Structure(format!("label {c} outside 0..{classes}")));
            }
            counts[c] += 1;
            for (acc, x) in centroids[c * m..(c + 1) * m].iter_mut().zip(d.row(i)) {
                *acc += x;
            }
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::Structure(format!("class {c} has no training rows")));
        }
        for (c, &n) in counts.iter().enumerate() {
            centroids[c * m..(c + 1) * m].iter_mut().for_each(|x| *x /= n as f64);
        }
        Ok(Classifier { centroids, classes, m })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Class of the nearest centroid; ties go to the lowest class.
    pub fn predict_row(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for c in 0..self.classes {
            let dist = sq_dist(x, &self.centroids[c * self.m..(c + 1) * self.m]);
            if dist < best.1 {
                best = (c, dist);
            }
        }
        best.0
    }

    pub fn predict(&self, d: &DataMatrix) -> Result<Vec<usize>> {
        if d.m() != self.m {
            return Err(Error::Structure(format!("classifier expects {} features, got {}", self.m, d.m())));
        }
        Ok((0..d.n()).map(|i| self.predict_row(d.row(i))).collect())
    }
}
