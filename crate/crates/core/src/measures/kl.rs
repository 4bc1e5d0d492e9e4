use alloc::vec::Vec;

use super::curve::{CurveSeries, Prediction, NO_STRUCTURE};
use crate::error::{Error, Result};

/// DIFF(k) = (k−1)^(2/m)·v(k−1) − k^(2/m)·v(k) for k = 2..=k_max of a curve
/// over 1..=k_max (index k−2).
pub fn diff_curve(curve: &CurveSeries, m: usize) -> Result<Vec<f64>> {
    curve.require_from_one("DIFF", 2)?;
    if m < 1 {
        return Err(Error::Parameter("feature count must be positive".into()));
    }
    let p = 2.0 / m as f64;
    let v = curve.values();
    Ok((2..=v.len())
        .map(|k| libm::pow((k - 1) as f64, p) * v[k - 2] - libm::pow(k as f64, p) * v[k - 1])
        .collect())
}

/// Krzanowski–Lai: k* maximizes |DIFF(k)/DIFF(k+1)| over [2, k_max−1].
/// A zero DIFF(k+1) counts as +∞ (smallest such k wins); if every DIFF is
/// zero there is no structure.
pub fn kl_predict(curve: &CurveSeries, m: usize) -> Result<Prediction> {
    curve.require_from_one("KL", 4)?;
    let diff = diff_curve(curve, m)?;
    let dk = |k: usize| diff[k - 2];
    let k_max = curve.len();
    let mut kl = Vec::with_capacity(k_max - 2);
    for k in 2..k_max {
        kl.push(if dk(k + 1) == 0.0 {
            if dk(k) == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            (dk(k) / dk(k + 1)).abs()
        });
    }
    let evidence = CurveSeries::new((2..k_max).collect(), kl.clone(), None)?;
    if diff.iter().all(|&x| x == 0.0) {
        let mut p = Prediction::new(NO_STRUCTURE, "kl-argmax", evidence);
        p.low_confidence = true;
        return Ok(p.warn("all DIFF values are zero".into()));
    }
    let mut best = 0;
    for (i, &v) in kl.iter().enumerate() {
        if v > kl[best] {
            best = i;
        }
    }
    Ok(Prediction::new(best + 2, "kl-argmax", evidence))
}
