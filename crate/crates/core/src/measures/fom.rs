use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::curve::CurveSeries;
use super::wcss::wcss_r_path;
use crate::clusterer::Clusterer;
use crate::data::{DataMatrix, Partition};
use crate::error::{Error, Result};
use crate::seed;

/// `d` without feature `e`. With a single feature, an all-zero column
/// stands in for the empty feature set (all items coincide either way).
fn leave_out(d: &DataMatrix, e: usize) -> Result<DataMatrix> {
    if d.m() == 1 {
        DataMatrix::new(vec![0.0; d.n()], d.n(), 1)
    } else {
        d.drop_column(e)
    }
}

/// Adjusted FOM(e,k): root-mean-square deviation of feature e from its
/// cluster means, divided by √((n−k)/n).
fn adjusted_fom(d: &DataMatrix, e: usize, p: &Partition) -> f64 {
    let n = d.n();
    let k = p.k();
    let mut sums = vec![0.0; k];
    let sizes = p.sizes();
    for (i, &c) in p.labels().iter().enumerate() {
        sums[c] += d.get(i, e);
    }
    let ss: f64 = p
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let r = d.get(i, e) - sums[c] / sizes[c] as f64;
            r * r
        })
        .sum();
    libm::sqrt(ss / n as f64) / libm::sqrt((n - k) as f64 / n as f64)
}

fn check_k(d: &DataMatrix, k: usize) -> Result<()> {
    if k < 1 || k >= d.n() {
        return Err(Error::Parameter(format!("FOM needs 1 <= k < n={}, got k={k}", d.n())));
    }
    Ok(())
}

/// Sum over left-out features e of the adjusted FOM(e,k). The clustering
/// without feature e uses seed `derive(seed, [e, k])`.
pub fn fom_value(d: &DataMatrix, clusterer: &Clusterer, k: usize, seed: u64) -> Result<f64> {
    check_k(d, k)?;
    let mut total = 0.0;
    for e in 0..d.m() {
        let p = clusterer.cluster(&leave_out(d, e)?, k, seed::derive(seed, &[e as u64, k as u64]))?;
        total += adjusted_fom(d, e, &p);
    }
    Ok(total)
}

/// FOM for k = 1..=k_max; equals [`fom_value`] at every k.
pub fn fom_curve(d: &DataMatrix, clusterer: &Clusterer, k_max: usize, seed: u64) -> Result<CurveSeries> {
    check_k(d, k_max)?;
    let ks: Vec<usize> = (1..=k_max).collect();
    let mut values = vec![0.0; k_max];
    for e in 0..d.m() {
        let parts = clusterer.cluster_all(&leave_out(d, e)?, &ks, |k| seed::derive(seed, &[e as u64, k as u64]))?;
        for (v, p) in values.iter_mut().zip(&parts) {
            *v += adjusted_fom(d, e, p);
        }
    }
    Ok(CurveSeries::from_one(values))
}

/// FOM along the WCSS-R descent run once per left-out feature e with seed
/// `derive(seed, [e])`.
pub fn fom_r_curve(d: &DataMatrix, refresh: usize, k_max: usize, niter: usize, seed: u64) -> Result<CurveSeries> {
    check_k(d, k_max)?;
    let mut values = vec![0.0; k_max];
    for e in 0..d.m() {
        let path = wcss_r_path(&leave_out(d, e)?, refresh, k_max, niter, seed::derive(seed, &[e as u64]))?;
        for (v, p) in values.iter_mut().zip(&path) {
            *v += adjusted_fom(d, e, p);
        }
    }
    Ok(CurveSeries::from_one(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::Linkage;

    #[test]
    fn k_one_closed_form() {
        // Identical columns: FOM(e,1) is the population sd of column e.
        let xs = [1.0, 2.0, 4.0, 7.0];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x]).collect();
        let d = DataMatrix::from_rows(&rows).unwrap();
        let mean = 3.5;
        let sd = libm::sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 4.0);
        let expect = 2.0 * sd / libm::sqrt(3.0 / 4.0);
        let got = fom_value(&d, &Clusterer::Hier(Linkage::Average), 1, 0).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!(fom_value(&d, &Clusterer::Hier(Linkage::Average), 4, 0).is_err());
    }

    #[test]
    fn single_feature() {
        let d = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        assert!(fom_value(&d, &Clusterer::Hier(Linkage::Average), 2, 0).is_ok());
    }
}
