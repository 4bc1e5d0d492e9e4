//! Synthetic datasets with known class structure.

use alloc::vec::Vec;
use alloc::format;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::data::{DataMatrix, GoldStandard};
use crate::error::{Error, Result};
use crate::seed;

fn normal(rng: &mut seed::Rng, mean: f64, sd: f64) -> f64 {
    mean + sd * rng.sample::<f64, _>(StandardNormal)
}

fn class_labels(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(c, &s)| core::iter::repeat_n(c, s)).collect()
}

/// 60×600, three classes of 20. Feature block c (200 columns) is drawn from
/// N(3,1) in class c and N(1,1) in the other classes.
pub fn gen_gaussian3(seed: u64) -> (DataMatrix, GoldStandard) {
    let labels = class_labels(&[20, 20, 20]);
    let mut rng = seed::rng(seed);
    let mut values = Vec::with_capacity(60 * 600);
    for &c in &labels {
        for j in 0..600 {
            let mean = if j / 200 == c { 3.0 } else { 1.0 };
            values.push(normal(&mut rng, mean, 1.0));
        }
    }
    (
        DataMatrix::new(values, 60, 600).expect("fixed shape"),
        GoldStandard::new(labels).expect("fixed classes"),
    )
}

/// Centers of the five Gaussian5 classes for side length `lambda`.
pub fn gaussian5_centers(lambda: f64) -> [(f64, f64); 5] {
    [(0.0, 0.0), (lambda, 0.0), (0.0, lambda), (lambda, lambda), (lambda / 2.0, lambda / 2.0)]
}

/// 250×2, five unit-variance bivariate Gaussians of 50 points: four at the
/// corners of a square of side `lambda`, one at its center.
pub fn gen_gaussian5(lambda: f64, seed: u64) -> Result<(DataMatrix, GoldStandard)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let labels = class_labels(&[50; 5]);
    let centers = gaussian5_centers(lambda);
    let mut rng = seed::rng(seed);
    let mut values = Vec::with_capacity(500);
    for &c in &labels {
        values.push(normal(&mut rng, centers[c].0, 1.0));
        values.push(normal(&mut rng, centers[c].1, 1.0));
    }
    Ok((
        DataMatrix::new(values, 250, 2).expect("fixed shape"),
        GoldStandard::new(labels).expect("fixed classes"),
    ))
}

/// Class sizes of Simulated6.
pub const SIMULATED6_SIZES: [usize; 6] = [8, 12, 10, 15, 5, 10];

/// 60×600 with six classes. Columns `50c..50c+50` mark class c with
/// N(5 − 0.5c, sd 0.4 + 0.1c) inside the class and N(0,1) elsewhere
/// (c counted from 0); the last 300 columns are N(0,1) noise.
pub fn gen_simulated6(seed: u64) -> (DataMatrix, GoldStandard) {
    let labels = class_labels(&SIMULATED6_SIZES);
    let mut rng = seed::rng(seed);
    let mut values = Vec::with_capacity(60 * 600);
    for &c in &labels {
        for j in 0..600 {
            let v = if j < 300 && j / 50 == c {
                normal(&mut rng, 5.0 - 0.5 * c as f64, 0.4 + 0.1 * c as f64)
            } else {
                normal(&mut rng, 0.0, 1.0)
            };
            values.push(v);
        }
    }
    (
        DataMatrix::new(values, 60, 600).expect("fixed shape"),
        GoldStandard::new(labels).expect("fixed classes"),
    )
}

/// Two spherical unit-variance clouds of `per_cloud` points in `dim`
/// dimensions, centered at the origin and at `separation` along every axis.
pub fn gen_two_clouds(per_cloud: usize, dim: usize, separation: f64, seed: u64) -> Result<(DataMatrix, GoldStandard)> {
    if per_cloud < 1 || dim < 1 {
        return Err(Error::Parameter("need at least one point and one dimension".into()));
    }
    let labels = class_labels(&[per_cloud, per_cloud]);
    let mut rng = seed::rng(seed);
    let mut values = Vec::with_capacity(2 * per_cloud * dim);
    for &c in &labels {
        for _ in 0..dim {
            values.push(normal(&mut rng, c as f64 * separation, 1.0));
        }
    }
    Ok((DataMatrix::new(values, 2 * per_cloud, dim)?, GoldStandard::new(labels)?))
}

/// One spherical unit-variance cloud of `n` points.
pub fn gen_gaussian_cloud(n: usize, dim: usize, seed: u64) -> Result<DataMatrix> {
    let mut rng = seed::rng(seed);
    let values = (0..n * dim).map(|_| normal(&mut rng, 0.0, 1.0)).collect();
    DataMatrix::new(values, n, dim)
}
