use alloc::vec::Vec;

use super::curve::{CurveSeries, Prediction, NO_STRUCTURE};
use super::kl::diff_curve;
use crate::error::Result;

/// chord(k) − v(k), where the chord joins (1, v₁ + a) and (k_max, v_kmax + a).
pub fn segment_lengths(curve: &CurveSeries, a: f64) -> Result<Vec<f64>> {
    curve.require_from_one("segment lengths", 3)?;
    Ok(offset_free_segments(curve.values()).into_iter().map(|s| s + a).collect())
}

fn offset_free_segments(v: &[f64]) -> Vec<f64> {
    let last = v.len() - 1;
    let slope = (v[last] - v[0]) / last as f64;
    (0..=last)
        .map(|i| if i == 0 || i == last { 0.0 } else { v[0] + slope * i as f64 - v[i] })
        .collect()
}

/// First interior local maximum of the chord-to-curve segment lengths. The
/// offset `a` shifts every segment equally, so the prediction is computed
/// without it; `a` only affects the evidence values.
fn geometric_rule(curve: &CurveSeries, a: f64, rule: &str) -> Result<Prediction> {
    curve.require_from_one(rule, 3)?;
    let seg = offset_free_segments(curve.values());
    let shown = CurveSeries::from_one(seg.iter().map(|s| s + a).collect());
    for k in 2..seg.len() {
        let (prev, here, next) = (seg[k - 2], seg[k - 1], seg[k]);
        if here > 0.0 && here >= prev && here > next {
            return Ok(Prediction::new(k, rule, shown));
        }
    }
    let mut p = Prediction::new(NO_STRUCTURE, rule, shown);
    p.low_confidence = true;
    Ok(p)
}

/// G-Gap: geometric stand-in for the Gap statistic on a WCSS (or log-WCSS)
/// curve over k = 1..=k_max.
pub fn g_gap_predict(curve: &CurveSeries, a: f64) -> Result<Prediction> {
    geometric_rule(curve, a, "g-gap")
}

/// The G-Gap rule applied to a FOM curve.
pub fn g_fom_predict(curve: &CurveSeries, a: f64) -> Result<Prediction> {
    geometric_rule(curve, a, "g-fom")
}

/// k* maximizing DIFF(k) over [3, k_max] on a FOM curve (ties to smallest k).
pub fn diff_fom_predict(curve: &CurveSeries, m: usize) -> Result<Prediction> {
    curve.require_from_one("DIFF-FOM", 3)?;
    let diff = diff_curve(curve, m)?;
    let k_max = curve.len();
    let vals: Vec<f64> = (3..=k_max).map(|k| diff[k - 2]).collect();
    let mut best = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v > vals[best] {
            best = i;
        }
    }
    Ok(Prediction::new(best + 3, "diff-fom-argmax", CurveSeries::new((3..=k_max).collect(), vals, None)?))
}
