use alloc::format;
use alloc::vec::Vec;

use super::curve::CurveSeries;
use crate::clusterer::Clusterer;
use crate::clustering::{centroids, kmeans, merge_min_centroid, KMeansInit};
use crate::data::{DataMatrix, Partition};
use crate::error::{Error, Result};
use crate::seed;

/// Within-cluster sum of squared distances to the cluster centroids.
pub fn wcss(d: &DataMatrix, p: &Partition) -> f64 {
    let m = d.m();
    let cent = centroids(d, p);
    p.labels()
        .iter()
        .enumerate()
        .map(|(i, &c)| d.row(i).iter().zip(&cent[c * m..(c + 1) * m]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
        .sum()
}

fn check_kmax(d: &DataMatrix, k_max: usize) -> Result<()> {
    if k_max < 1 || k_max > d.n() {
        return Err(Error::Parameter(format!("k_max={k_max} outside [1, {}]", d.n())));
    }
    Ok(())
}

/// WCSS for k = 1..=k_max, clustering afresh at every k with seed
/// `derive(seed, [k])`.
pub fn wcss_curve(d: &DataMatrix, clusterer: &Clusterer, k_max: usize, seed: u64) -> Result<CurveSeries> {
    check_kmax(d, k_max)?;
    let ks: Vec<usize> = (1..=k_max).collect();
    let parts = clusterer.cluster_all(d, &ks, |k| seed::derive(seed, &[k as u64]))?;
    Ok(CurveSeries::from_one(parts.iter().map(|p| wcss(d, p)).collect()))
}

/// The WCSS-R descent: partitions for k = 1..=k_max (index k−1).
///
/// Starts from K-means (random start) at `k_max`, merges the two clusters
/// with the closest centroids to step down, and when `refresh > 0` and
/// k is a multiple of `refresh` re-runs K-means from the merged partition
/// with seed `derive(seed, [k])`.
pub fn wcss_r_path(d: &DataMatrix, refresh: usize, k_max: usize, niter: usize, seed: u64) -> Result<Vec<Partition>> {
    check_kmax(d, k_max)?;
    let mut path = Vec::with_capacity(k_max);
    let mut current = kmeans(d, k_max, &KMeansInit::Random, niter, seed)?;
    path.push(current.clone());
    for k in (1..k_max).rev() {
        let merged = merge_min_centroid(d, &current)?;
        current = if refresh > 0 && k % refresh == 0 {
            kmeans(d, k, &KMeansInit::FromPartition(merged), niter, seed::derive(seed, &[k as u64]))?
        } else {
            merged
        };
        path.push(current.clone());
    }
    path.reverse();
    Ok(path)
}

/// WCSS along the WCSS-R descent.
pub fn wcss_r_curve(d: &DataMatrix, refresh: usize, k_max: usize, niter: usize, seed: u64) -> Result<CurveSeries> {
    let path = wcss_r_path(d, refresh, k_max, niter, seed)?;
    Ok(CurveSeries::from_one(path.iter().map(|p| wcss(d, p)).collect()))
}
