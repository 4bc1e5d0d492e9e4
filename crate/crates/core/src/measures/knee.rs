use alloc::vec::Vec;

use super::curve::{CurveSeries, Prediction};
use crate::error::{Error, Result};

/// Knee of a curve: the interior k maximizing the second difference
/// v(k−1) − 2v(k) + v(k+1) (negated when `decreasing` is false), ties to
/// the smallest k. The evidence holds the second differences. Curves whose
/// second differences are all equal (affine curves) are flagged
/// low-confidence.
pub fn knee_detect(curve: &CurveSeries, decreasing: bool) -> Result<Prediction> {
    if curve.len() < 3 {
        return Err(Error::Parameter("knee detection needs at least 3 points".into()));
    }
    let v = curve.values();
    let sign = if decreasing { 1.0 } else { -1.0 };
    let second: Vec<f64> = (1..v.len() - 1).map(|i| sign * (v[i - 1] - 2.0 * v[i] + v[i + 1])).collect();
    // Differences within rounding noise of the maximum count as ties.
    let scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let (lo, hi) = second.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let best = second.iter().position(|&s| s >= hi - tol).unwrap();
    let ks = curve.k_values()[1..v.len() - 1].to_vec();
    let k_star = ks[best];
    let mut p = Prediction::new(k_star, "knee-second-difference", CurveSeries::new(ks, second, None)?);
    if hi - lo <= tol {
        p.low_confidence = true;
    }
    Ok(p)
}
