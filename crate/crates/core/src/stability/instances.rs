//! ME, Clest, Levine–Domany, Roth et al., BagClust1/2, MECCA, and the Gap
//! statistic as a paradigm instance.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::consensus::ConsensusState;
use super::paradigm::{
    attempt_coord, normalized_misclassification, pair_agreement, run_stability_statistic, split, Collected, Wiring,
    MAX_RETRIES,
};
use super::{mean, median, Classifier, Route, StabilityConfig};
use crate::clusterer::Clusterer;
use crate::clustering::{build_dendrogram, cut_dendrogram, DistanceMatrix, Linkage};
use crate::data::{DataMatrix, Partition};
use crate::datagen::{apply_dgp, bootstrap, subsample, DgpSpec, NullModel};
use crate::error::{Error, Result};
use crate::indices::ExternalIndex;
use crate::matching::match_labels;
use crate::measures::{assemble_gap, CurveSeries, GapResult, Prediction, NO_STRUCTURE};
use crate::seed::{self, role, tag, ORIGINAL};

fn values(collected: Vec<Collected>) -> Vec<f64> {
    collected
        .into_iter()
        .filter_map(|c| match c {
            Collected::Value(v) => Some(v),
            _ => None,
        })
        .collect()
}

/// Smallest k attaining the maximum of `v` (or minimum when `min`).
fn arg_extreme(ks: &[usize], v: &[f64], min: bool) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        let better = if min { v[i] < v[best] } else { v[i] > v[best] };
        if better {
            best = i;
        }
    }
    ks[best]
}

// ---------------------------------------------------------------- ME

/// Histogram bins over the range of the external index.
pub const ME_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct MeResult {
    pub k_values: Vec<usize>,
    /// Index values of every iteration, per k.
    pub values: Vec<Vec<f64>>,
    /// Bin counts per k over [`MeResult::low`, 1].
    pub histograms: Vec<Vec<u64>>,
    pub low: f64,
    /// Evidence is the fraction of values above 0.9.
    pub prediction: Prediction,
}

fn me_values(d: &DataMatrix, cfg: &StabilityConfig, k: usize) -> Result<Vec<f64>> {
    match cfg.route {
        Route::Paradigm => Ok(values(run_stability_statistic(d, cfg, k, &Wiring::me(cfg.beta, cfg.external_index))?)),
        Route::Native => {
            let mut out = Vec::with_capacity(cfg.h);
            for h in 0..cfg.h as u64 {
                let mut attempt = 0;
                loop {
                    let it = attempt_coord(h, attempt);
                    let t = |r, i| seed::task(cfg.seed, tag::ME, k as u64, it, r, i);
                    let r1 = subsample(d.n(), cfg.beta, t(role::DGP, 0))?;
                    let r2 = subsample(d.n(), cfg.beta, t(role::DGP, 1))?;
                    let p1 = cfg.clusterer().cluster(&d.select_rows(&r1)?, k, t(role::CLUSTER, 0))?;
                    let p2 = cfg.clusterer().cluster(&d.select_rows(&r2)?, k, t(role::CLUSTER, 1))?;
                    let pos2: BTreeMap<usize, usize> = r2.iter().enumerate().map(|(q, &r)| (r, q)).collect();
                    let (mut a, mut b) = (Vec::new(), Vec::new());
                    for (p, r) in r1.iter().enumerate() {
                        if let Some(&q) = pos2.get(r) {
                            a.push(p1.label(p));
                            b.push(p2.label(q));
                        }
                    }
                    if a.len() >= 2 {
                        out.push(cfg.external_index.between(&a, &b)?);
                        break;
                    }
                    attempt += 1;
                    if attempt == MAX_RETRIES {
                        return Err(Error::Size(format!("iteration {h}: subsamples never overlapped")));
                    }
                }
            }
            Ok(out)
        }
    }
}

/// ME: the distribution over iterations of the external index between two
/// clustered subsamples, restricted to their common rows.
///
/// k* is the smallest k where at least 80% of the values exceed 0.9 while
/// fewer than 80% do at k+1.
pub fn me_run(d: &DataMatrix, cfg: &StabilityConfig) -> Result<MeResult> {
    cfg.validate_for(d)?;
    let ks = cfg.ks();
    let low = if cfg.external_index == ExternalIndex::AdjustedRand { -1.0 } else { 0.0 };
    let mut all = Vec::with_capacity(ks.len());
    let mut histograms = Vec::with_capacity(ks.len());
    let mut frac = Vec::with_capacity(ks.len());
    for &k in &ks {
        let v = me_values(d, cfg, k)?;
        let mut hist = vec![0u64; ME_BINS];
        for &x in &v {
            let b = libm::floor((x - low) / (1.0 - low) * ME_BINS as f64);
            hist[(b.max(0.0) as usize).min(ME_BINS - 1)] += 1;
        }
        frac.push(v.iter().filter(|&&x| x > 0.9).count() as f64 / v.len() as f64);
        histograms.push(hist);
        all.push(v);
    }
    let evidence = CurveSeries::new(ks.clone(), frac.clone(), None)?;
    let hit = (0..ks.len().saturating_sub(1)).find(|&i| frac[i] >= 0.8 && frac[i + 1] < 0.8);
    let prediction = match hit {
        Some(i) => Prediction::new(ks[i], "me-threshold-fraction", evidence),
        None => {
            let mut p = Prediction::new(NO_STRUCTURE, "me-threshold-fraction", evidence);
            p.low_confidence = true;
            p.warn("no k has a stable index distribution followed by an unstable one".into())
        }
    };
    Ok(MeResult { k_values: ks, values: all, histograms, low, prediction })
}

// ---------------------------------------------------------------- classifier-based

fn supervised_values(d: &DataMatrix, cfg: &StabilityConfig, k: usize, tag_: u64) -> Result<Vec<f64>> {
    if cfg.alpha <= 0.0 {
        return Err(Error::Parameter("a training fraction alpha > 0 is required".into()));
    }
    if cfg.route == Route::Paradigm {
        let w = if tag_ == tag::CLEST { Wiring::clest(cfg.external_index) } else { Wiring::roth() };
        return Ok(values(run_stability_statistic(d, cfg, k, &w)?));
    }
    let mut out = Vec::with_capacity(cfg.h);
    for h in 0..cfg.h as u64 {
        let it = attempt_coord(h, 0);
        let t = |r, i| seed::task(cfg.seed, tag_, k as u64, it, r, i);
        let (train, learn) = split(d.n(), cfg.alpha, t(role::SPLIT, 0));
        let tm = d.select_rows(&train)?;
        let labels = cfg.clusterer().cluster(&tm, k, t(role::TRAIN, 0))?;
        let clf = Classifier::train(&tm, labels.labels(), labels.k())?;
        let lm = d.select_rows(&learn)?;
        let predicted = clf.predict(&lm)?;
        let clustered = cfg.clusterer().cluster(&lm, k, t(role::CLUSTER, 1))?;
        out.push(if tag_ == tag::CLEST {
            cfg.external_index.between(&predicted, clustered.labels())?
        } else {
            normalized_misclassification(&predicted, clf.classes(), clustered.labels(), clustered.k(), k)?
        });
    }
    Ok(out)
}

/// Clest settings beyond [`StabilityConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClestParams {
    /// Null reference datasets.
    pub b0: usize,
    pub p_max: f64,
    pub d_min: f64,
    pub null_model: NullModel,
}

impl Default for ClestParams {
    fn default() -> Self {
        ClestParams { b0: 20, p_max: 0.05, d_min: 0.05, null_model: NullModel::PoissonBox }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClestResult {
    /// Median index t_k on the data.
    pub t: CurveSeries,
    /// Mean of the null medians.
    pub t0: CurveSeries,
    /// Fraction of null medians at least t_k.
    pub p: CurveSeries,
    /// t_k − t0_k; the evidence of the prediction.
    pub d: CurveSeries,
    pub prediction: Prediction,
}

/// Clest: classifier-versus-clusterer agreement on the learning rows,
/// compared with the same statistic on `b0` null datasets.
///
/// Null dataset b comes from `derive(seed, [CLEST, 1, b])` and its inner loop
/// runs with master seed `derive(seed, [CLEST, 2, b])`.
pub fn clest_run(d: &DataMatrix, cfg: &StabilityConfig, params: &ClestParams) -> Result<ClestResult> {
    cfg.validate_for(d)?;
    if params.b0 < 1 {
        return Err(Error::Parameter("Clest needs at least one null dataset".into()));
    }
    let ks = cfg.ks();
    let t: Vec<f64> = ks.iter().map(|&k| supervised_values(d, cfg, k, tag::CLEST).map(|v| median(&v))).collect::<Result<_>>()?;
    let mut null_t = vec![Vec::with_capacity(params.b0); ks.len()];
    for b in 0..params.b0 as u64 {
        let g = apply_dgp(d, &DgpSpec::Null(params.null_model), seed::derive(cfg.seed, &[tag::CLEST, 1, b]))?;
        let mut inner = cfg.clone();
        inner.seed = seed::derive(cfg.seed, &[tag::CLEST, 2, b]);
        for (i, &k) in ks.iter().enumerate() {
            null_t[i].push(median(&supervised_values(&g.matrix, &inner, k, tag::CLEST)?));
        }
    }
    let t0: Vec<f64> = null_t.iter().map(|v| mean(v)).collect();
    let p: Vec<f64> = null_t
        .iter()
        .zip(&t)
        .map(|(v, &tk)| v.iter().filter(|&&x| x >= tk).count() as f64 / params.b0 as f64)
        .collect();
    let dk: Vec<f64> = t.iter().zip(&t0).map(|(a, b)| a - b).collect();
    let mut k_star = NO_STRUCTURE;
    let mut best = f64::NEG_INFINITY;
    for (i, &k) in ks.iter().enumerate() {
        if p[i] <= params.p_max && dk[i] >= params.d_min && dk[i] > best {
            best = dk[i];
            k_star = k;
        }
    }
    let curve = |v: Vec<f64>| CurveSeries::new(ks.clone(), v, None);
    let d_curve = curve(dk)?;
    Ok(ClestResult {
        prediction: Prediction::new(k_star, "clest-significant-max", d_curve.clone()),
        t: curve(t)?,
        t0: curve(t0)?,
        p: curve(p)?,
        d: d_curve,
    })
}

/// Roth et al.: expected instability (normalized misclassification of a
/// classifier against the clusterer on the learning rows); k* = argmin.
pub fn roth_run(d: &DataMatrix, cfg: &StabilityConfig) -> Result<Prediction> {
    cfg.validate_for(d)?;
    let ks = cfg.ks();
    let v: Vec<f64> = ks.iter().map(|&k| supervised_values(d, cfg, k, tag::ROTH).map(|v| mean(&v))).collect::<Result<_>>()?;
    let k_star = arg_extreme(&ks, &v, true);
    Ok(Prediction::new(k_star, "roth-min-instability", CurveSeries::new(ks, v, None)?))
}

// ---------------------------------------------------------------- Levine–Domany

/// Levine–Domany figure of merit R^k: mean over subsamples of the fraction
/// of pairs co-clustered on the full data that stay co-clustered; k* is the
/// global maximum (ties to the smallest k).
pub fn levine_domany_run(d: &DataMatrix, cfg: &StabilityConfig) -> Result<Prediction> {
    cfg.validate_for(d)?;
    let ks = cfg.ks();
    let mut r = Vec::with_capacity(ks.len());
    for &k in &ks {
        let v = match cfg.route {
            Route::Paradigm => values(run_stability_statistic(d, cfg, k, &Wiring::levine_domany(cfg.beta))?),
            Route::Native => {
                let k64 = k as u64;
                let base = cfg.clusterer().cluster(d, k, seed::task(cfg.seed, tag::LEVINE_DOMANY, k64, ORIGINAL, role::CLUSTER, 0))?;
                let base_of: BTreeMap<usize, usize> = base.labels().iter().copied().enumerate().collect();
                let mut out = Vec::with_capacity(cfg.h);
                for h in 0..cfg.h as u64 {
                    let t = |r, i| seed::task(cfg.seed, tag::LEVINE_DOMANY, k64, attempt_coord(h, 0), r, i);
                    let rows = subsample(d.n(), cfg.beta, t(role::DGP, 0))?;
                    let p = cfg.clusterer().cluster(&d.select_rows(&rows)?, k, t(role::CLUSTER, 1))?;
                    out.push(pair_agreement(&base_of, &rows, p.labels()));
                }
                out
            }
        };
        r.push(mean(&v));
    }
    let k_star = arg_extreme(&ks, &r, false);
    Ok(Prediction::new(k_star, "levine-domany-global-max", CurveSeries::new(ks, r, None)?))
}

// ---------------------------------------------------------------- BagClust

/// BagClust1: `cfg.h` bootstrap samples clustered at k and aligned with the
/// clustering of the full data; every item takes its majority cluster (ties
/// to the lowest). Items never drawn keep their label from the full data.
pub fn bagclust1(d: &DataMatrix, cfg: &StabilityConfig, k: usize) -> Result<Partition> {
    cfg.validate()?;
    let n = d.n();
    let k64 = k as u64;
    let base = cfg.clusterer().cluster(d, k, seed::task(cfg.seed, tag::BAGCLUST1, k64, ORIGINAL, role::CLUSTER, 0))?;
    let rounds: Vec<(Vec<usize>, Vec<usize>)> = match cfg.route {
        Route::Paradigm => run_stability_statistic(d, cfg, k, &Wiring::bagclust1())?
            .into_iter()
            .filter_map(|c| match c {
                Collected::Votes { rows, labels } => Some((rows, labels)),
                _ => None,
            })
            .collect(),
        Route::Native => {
            let mut out = Vec::with_capacity(cfg.h);
            for h in 0..cfg.h as u64 {
                let t = |r, i| seed::task(cfg.seed, tag::BAGCLUST1, k64, attempt_coord(h, 0), r, i);
                let rows = bootstrap(n, t(role::DGP, 0));
                let p = cfg.clusterer().cluster(&d.select_rows(&rows)?, k, t(role::CLUSTER, 1))?;
                let first: Vec<usize> = rows.iter().map(|&r| base.label(r)).collect();
                let m = match_labels(&first, base.k(), p.labels(), p.k())?;
                out.push((rows, m.relabeled));
            }
            out
        }
    };
    let width = base.k().max(k);
    let mut votes = vec![0u32; n * width];
    let mut drawn = vec![false; n];
    for (rows, labels) in &rounds {
        for (&r, &l) in rows.iter().zip(labels) {
            votes[r * width + l] += 1;
            drawn[r] = true;
        }
    }
    let labels: Vec<usize> = (0..n)
        .map(|i| {
            if !drawn[i] {
                return base.label(i);
            }
            let row = &votes[i * width..(i + 1) * width];
            (0..width).fold(0, |b, c| if row[c] > row[b] { c } else { b })
        })
        .collect();
    Ok(Partition::from_labels(&labels))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BagClust2Result {
    /// 1 − M/I, and 1 for pairs never sampled together.
    pub dissimilarity: DistanceMatrix,
    /// Average-linkage cut at k of the dissimilarity.
    pub partition: Partition,
    pub warnings: Vec<String>,
}

/// BagClust2: co-clustering over `cfg.h` subsamples turned into a
/// dissimilarity and clustered again.
pub fn bagclust2(d: &DataMatrix, cfg: &StabilityConfig, k: usize) -> Result<BagClust2Result> {
    cfg.validate()?;
    let mut st = ConsensusState::new(d.n());
    match cfg.route {
        Route::Paradigm => {
            for c in run_stability_statistic(d, cfg, k, &Wiring::bagclust2(cfg.beta))? {
                if let Collected::CoClustering { rows, labels } = c {
                    st.add_round(&rows, &labels);
                }
            }
        }
        Route::Native => {
            for h in 0..cfg.h as u64 {
                let t = |r| seed::task(cfg.seed, tag::BAGCLUST2, k as u64, h, r, 0);
                let rows = subsample(d.n(), cfg.beta, t(role::DGP))?;
                let p = cfg.clusterer().cluster(&d.select_rows(&rows)?, k, t(role::CLUSTER))?;
                st.add_round(&rows, p.labels());
            }
        }
    }
    let dissimilarity = DistanceMatrix::from_fn(d.n(), |a, b| st.consensus(a, b).map_or(1.0, |c| 1.0 - c));
    let mut warnings = Vec::new();
    let undefined = st.undefined_pairs();
    if undefined > 0 {
        let msg = format!("{undefined} pairs never sampled together; dissimilarity set to 1");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let partition = cut_dendrogram(&build_dendrogram(&dissimilarity, Linkage::Average), k)?;
    Ok(BagClust2Result { dissimilarity, partition, warnings })
}

// ---------------------------------------------------------------- MECCA

#[derive(Debug, Clone, PartialEq)]
pub struct MeccaResult {
    pub observed: f64,
    pub null_values: Vec<f64>,
    /// Fraction of null values strictly above the observed one.
    pub p_value: f64,
    /// `p_value <= alpha_level`.
    pub significant: bool,
}

/// MECCA: significance of a partition statistic against `l` null datasets.
///
/// The data is clustered with `task(seed, MECCA, k, ORIGINAL, CLUSTER, 0)`;
/// null dataset i comes from `task(seed, MECCA, ALL_K, i, DGP, 0)` and is
/// clustered with `task(seed, MECCA, k, i, CLUSTER, 1)`.
#[allow(clippy::too_many_arguments)]
pub fn mecca(
    d: &DataMatrix,
    clusterer: &Clusterer,
    k: usize,
    l: usize,
    statistic: &dyn Fn(&DataMatrix, &Partition) -> f64,
    alpha_level: f64,
    null_model: NullModel,
    seed: u64,
) -> Result<MeccaResult> {
    if l < 1 {
        return Err(Error::Parameter("MECCA needs at least one null dataset".into()));
    }
    let k64 = k as u64;
    let p = clusterer.cluster(d, k, seed::task(seed, tag::MECCA, k64, ORIGINAL, role::CLUSTER, 0))?;
    let observed = statistic(d, &p);
    let mut null_values = Vec::with_capacity(l);
    for i in 0..l as u64 {
        let g = apply_dgp(d, &DgpSpec::Null(null_model), seed::task(seed, tag::MECCA, seed::ALL_K, i, role::DGP, 0))?;
        let pi = clusterer.cluster(&g.matrix, k, seed::task(seed, tag::MECCA, k64, i, role::CLUSTER, 1))?;
        null_values.push(statistic(&g.matrix, &pi));
    }
    let p_value = null_values.iter().filter(|&&v| v > observed).count() as f64 / l as f64;
    Ok(MeccaResult { observed, null_values, p_value, significant: p_value <= alpha_level })
}

// ---------------------------------------------------------------- Gap

/// The Gap statistic computed through [`run_stability_statistic`]. Equal to
/// [`crate::measures::gap_predict`] with the same arguments for every
/// clusterer except the WCSS-R descent, which that function runs once for
/// all k.
pub fn gap_via_paradigm(
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
    let mut cfg = StabilityConfig::new(clusterer.clone(), 2, k_max, seed);
    cfg.h = steps;
    cfg.dgp = DgpSpec::Null(null_model);
    cfg.route = Route::Paradigm;
    let wiring = Wiring::gap(null_model, l);
    let mut observed = vec![None; k_max];
    let mut per_step = vec![vec![vec![None; k_max]; l]; steps];
    for k in 1..=k_max {
        for (s, c) in run_stability_statistic(d, &cfg, k, &wiring)?.into_iter().enumerate() {
            if let Collected::LogWcss(v) = c {
                observed[k - 1] = v[0];
                for i in 0..l {
                    per_step[s][i][k - 1] = v[i + 1];
                }
            }
        }
    }
    assemble_gap(&observed, &per_step)
}
