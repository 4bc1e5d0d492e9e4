use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::distance::sq_dist;
use crate::data::{DataMatrix, Partition};
use crate::error::{Error, Result};
use crate::seed;

/// Starting point of a K-means run.
#[derive(Debug, Clone, PartialEq)]
pub enum KMeansInit {
    /// k distinct rows drawn at random become the centroids.
    Random,
    /// Centroids of a given partition with the requested k.
    FromPartition(Partition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Within-cluster sum of squares after each assignment pass.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

/// Row-major k×m matrix of cluster means.
pub fn centroids(d: &DataMatrix, p: &Partition) -> Vec<f64> {
    centroids_raw(d, p.labels(), p.k())
}

fn centroids_raw(d: &DataMatrix, labels: &[usize], k: usize) -> Vec<f64> {
    let m = d.m();
    let mut c = vec![0.0; k * m];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (acc, &v) in c[l * m..(l + 1) * m].iter_mut().zip(d.row(i)) {
            *acc += v;
        }
    }
    for l in 0..k {
        if counts[l] > 0 {
            let inv = counts[l] as f64;
            c[l * m..(l + 1) * m].iter_mut().for_each(|v| *v /= inv);
        }
    }
    c
}

fn assign(d: &DataMatrix, cent: &[f64], k: usize, labels: &mut [usize]) {
    let m = d.m();
    for (i, l) in labels.iter_mut().enumerate() {
        let x = d.row(i);
        let mut best = (0, f64::INFINITY);
        for c in 0..k {
            let dist = sq_dist(x, &cent[c * m..(c + 1) * m]);
            if dist < best.1 {
                best = (c, dist);
            }
        }
        *l = best.0;
    }
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(d: &DataMatrix, cent: &mut [f64], k: usize, labels: &mut [usize]) {
    let m = d.m();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for e in 0..k {
        if counts[e] > 0 {
            continue;
        }
        let mut far = (usize::MAX, -1.0);
        for (i, &l) in labels.iter().enumerate() {
            if counts[l] < 2 {
                continue;
            }
            let dist = sq_dist(d.row(i), &cent[l * m..(l + 1) * m]);
            if dist > far.1 {
                far = (i, dist);
            }
        }
        let i = far.0;
        counts[labels[i]] -= 1;
        labels[i] = e;
        counts[e] = 1;
        cent[e * m..(e + 1) * m].copy_from_slice(d.row(i));
    }
}

fn objective(d: &DataMatrix, labels: &[usize], k: usize) -> f64 {
    let m = d.m();
    let cent = centroids_raw(d, labels, k);
    labels.iter().enumerate().map(|(i, &l)| sq_dist(d.row(i), &cent[l * m..(l + 1) * m])).sum()
}

/// Lloyd's K-means returning the partition only.
pub fn kmeans(d: &DataMatrix, k: usize, init: &KMeansInit, niter: usize, seed: u64) -> Result<Partition> {
    kmeans_traced(d, k, init, niter, seed).map(|r| r.partition)
}

/// Lloyd's K-means.
///
/// Stops when a centroid update leaves the assignment unchanged or after
/// `niter` updates.
/// Assignment ties go to the lowest cluster index.
pub fn kmeans_traced(d: &DataMatrix, k: usize, init: &KMeansInit, niter: usize, seed: u64) -> Result<KMeansResult> {
    let n = d.n();
    if k < 1 || k > n {
        return Err(Error::Parameter(format!("k={k} outside [1, {n}]")));
    }
    if niter < 1 {
        return Err(Error::Parameter("niter must be at least 1".into()));
    }
    let m = d.m();
    let mut cent = match init {
        KMeansInit::Random => {
            let mut rng = seed::rng(seed);
            let picks = rand::seq::index::sample(&mut rng, n, k);
            let mut c = Vec::with_capacity(k * m);
            for i in picks.iter() {
                c.extend_from_slice(d.row(i));
            }
            c
        }
        KMeansInit::FromPartition(p) => {
            if p.k() != k || p.n() != n {
                return Err(Error::Parameter(format!(
                    "initial partition has k={} over {} items, expected k={k} over {n}",
                    p.k(),
                    p.n()
                )));
            }
            centroids(d, p)
        }
    };
    let mut labels = vec![0; n];
    assign(d, &cent, k, &mut labels);
    repair_empty(d, &mut cent, k, &mut labels);
    let mut trace = vec![objective(d, &labels, k)];
    let mut iterations = 0;
    let mut next = labels.clone();
    while iterations < niter {
        cent = centroids_raw(d, &labels, k);
        assign(d, &cent, k, &mut next);
        repair_empty(d, &mut cent, k, &mut next);
        iterations += 1;
        if next == labels {
            break;
        }
        core::mem::swap(&mut labels, &mut next);
        trace.push(objective(d, &labels, k));
    }
    Ok(KMeansResult { partition: Partition::from_raw(labels, k), objective_trace: trace, iterations })
}

/// Unites the two clusters whose centroids are closest (lowest pair on ties).
pub fn merge_min_centroid(d: &DataMatrix, p: &Partition) -> Result<Partition> {
    let k = p.k();
    if k < 2 {
        return Err(Error::Parameter("need at least two clusters to merge".into()));
    }
    let m = d.m();
    let cent = centroids(d, p);
    let mut best = (0, 1, f64::INFINITY);
    for a in 0..k {
        for b in a + 1..k {
            let dist = sq_dist(&cent[a * m..(a + 1) * m], &cent[b * m..(b + 1) * m]);
            if dist < best.2 {
                best = (a, b, dist);
            }
        }
    }
    let (a, b, _) = best;
    let labels = p
        .labels()
        .iter()
        .map(|&l| match l {
            l if l == b => a,
            l if l > b => l - 1,
            l => l,
        })
        .collect();
    Ok(Partition::from_raw(labels, k - 1))
}
