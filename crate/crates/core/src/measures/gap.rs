use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::curve::{CurveSeries, Prediction};
use super::wcss::wcss;
use crate::clusterer::Clusterer;
use crate::data::DataMatrix;
use crate::datagen::{apply_dgp, DgpSpec, NullModel};
use crate::error::{Error, Result};
use crate::seed::{self, role, tag, ORIGINAL, ALL_K};

/// One Monte Carlo step of the Gap statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct GapStep {
    /// Gap(k) with s(k) as dispersion, over the k where every WCSS is positive.
    pub gap: CurveSeries,
    pub k_star: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    /// The most frequent step prediction (ties to the smallest k). Evidence
    /// is the step-averaged Gap and s.
    pub prediction: Prediction,
    pub steps: Vec<GapStep>,
}

/// Log-WCSS of `d` clustered at k = 1..=k_max (`None` where WCSS is 0).
pub(crate) fn log_wcss_curve(
    d: &DataMatrix,
    clusterer: &Clusterer,
    k_max: usize,
    seed_of: impl Fn(usize) -> u64,
) -> Result<Vec<Option<f64>>> {
    let ks: Vec<usize> = (1..=k_max).collect();
    let parts = clusterer.cluster_all(d, &ks, seed_of)?;
    Ok(parts
        .iter()
        .map(|p| {
            let w = wcss(d, p);
            if w > 0.0 { Some(libm::log(w)) } else { None }
        })
        .collect())
}

/// Gap(k) and s(k) from the observed and null log-WCSS values.
pub(crate) fn gap_from_logs(observed: &[Option<f64>], nulls: &[Vec<Option<f64>>]) -> Vec<Option<(f64, f64)>> {
    let l = nulls.len() as f64;
    (0..observed.len())
        .map(|k| {
            let obs = observed[k]?;
            let vals: Option<Vec<f64>> = nulls.iter().map(|n| n[k]).collect();
            let vals = vals?;
            let mean = vals.iter().sum::<f64>() / l;
            let sd = libm::sqrt(vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / l);
            Some((mean - obs, libm::sqrt(1.0 + 1.0 / l) * sd))
        })
        .collect()
}

/// First k with Gap(k) ≥ Gap(k+1) − s(k+1); k_max when none qualifies.
pub(crate) fn gap_rule(gs: &[Option<(f64, f64)>]) -> (usize, bool) {
    for k in 1..gs.len() {
        if let (Some((g, _)), Some((g1, s1))) = (gs[k - 1], gs[k]) {
            if g >= g1 - s1 {
                return (k, true);
            }
        }
    }
    (gs.len(), false)
}

/// Gap statistic with `l` null datasets per step and the mode over `steps`
/// step predictions.
///
/// Seeds: null dataset i of step s comes from `task(seed, GAP, ALL_K, s, DGP, i)`
/// and is clustered at k with `task(seed, GAP, k, s, CLUSTER, i + 1)`; the
/// observed data is clustered once with `task(seed, GAP, k, ORIGINAL, CLUSTER, 0)`.
#[allow(clippy::too_many_arguments)]
pub fn gap_predict(
    d: &DataMatrix,
    clusterer: &Clusterer,
    null_model: NullModel,
    l: usize,
    steps: usize,
    k_max: usize,
    seed: u64,
) -> Result<GapResult> {
    if l < 2 || steps < 1 || k_max < 2 || k_max > d.n() {
        return Err(Error::Parameter(format!(
            "gap needs l >= 2, steps >= 1 and 2 <= k_max <= n (l={l}, steps={steps}, k_max={k_max})"
        )));
    }
    let observed = log_wcss_curve(d, clusterer, k_max, |k| seed::task(seed, tag::GAP, k as u64, ORIGINAL, role::CLUSTER, 0))?;
    let spec = DgpSpec::Null(null_model);
    let mut per_step = Vec::with_capacity(steps);
    for s in 0..steps as u64 {
        let mut nulls = Vec::with_capacity(l);
        for i in 0..l as u64 {
            let g = apply_dgp(d, &spec, seed::task(seed, tag::GAP, ALL_K, s, role::DGP, i))?;
            nulls.push(log_wcss_curve(&g.matrix, clusterer, k_max, |k| {
                seed::task(seed, tag::GAP, k as u64, s, role::CLUSTER, i + 1)
            })?);
        }
        per_step.push(nulls);
    }
    assemble_gap(&observed, &per_step)
}

/// Gap result from observed log-WCSS over k = 1..=k_max and, per step, the
/// log-WCSS curves of its null datasets.
pub(crate) fn assemble_gap(observed: &[Option<f64>], per_step: &[Vec<Vec<Option<f64>>>]) -> Result<GapResult> {
    let k_max = observed.len();
    let mut out_steps = Vec::with_capacity(per_step.len());
    let mut warnings = Vec::new();
    for (s, nulls) in per_step.iter().enumerate() {
        let gs = gap_from_logs(observed, nulls);
        let (k_star, found) = gap_rule(&gs);
        if !found {
            warnings.push(format!("step {s}: no k satisfied the gap rule; using k_max"));
        }
        out_steps.push(GapStep { gap: defined_curve(&gs)?, k_star });
    }
    if let Some(k) = (1..=k_max).find(|&k| observed[k - 1].is_none()) {
        warnings.push(format!("WCSS is zero at k={k}; such k are excluded"));
    }

    let mut counts = vec![0usize; k_max + 1];
    out_steps.iter().for_each(|s| counts[s.k_star] += 1);
    let mut k_star = 1;
    for k in 1..=k_max {
        if counts[k] > counts[k_star] {
            k_star = k;
        }
    }

    let mut gap_sum = vec![0.0; k_max];
    let mut s_sum = vec![0.0; k_max];
    let mut hits = vec![0usize; k_max];
    for st in &out_steps {
        for (i, &k) in st.gap.k_values().iter().enumerate() {
            gap_sum[k - 1] += st.gap.values()[i];
            s_sum[k - 1] += st.gap.dispersion().unwrap()[i];
            hits[k - 1] += 1;
        }
    }
    let ks: Vec<usize> = (1..=k_max).filter(|&k| hits[k - 1] > 0).collect();
    let evidence = CurveSeries::new(
        ks.clone(),
        ks.iter().map(|&k| gap_sum[k - 1] / hits[k - 1] as f64).collect(),
        Some(ks.iter().map(|&k| s_sum[k - 1] / hits[k - 1] as f64).collect()),
    )?;
    let mut prediction = Prediction::new(k_star, "gap-first-crossing-mode", evidence);
    for w in warnings {
        prediction = prediction.warn(w);
    }
    Ok(GapResult { prediction, steps: out_steps })
}

fn defined_curve(gs: &[Option<(f64, f64)>]) -> Result<CurveSeries> {
    let ks: Vec<usize> = (1..=gs.len()).filter(|&k| gs[k - 1].is_some()).collect();
    let g = ks.iter().map(|&k| gs[k - 1].unwrap().0).collect();
    let s = ks.iter().map(|&k| gs[k - 1].unwrap().1).collect();
    CurveSeries::new(ks, g, Some(s))
}
