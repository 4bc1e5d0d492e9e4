//! Consensus clustering and its loop-switched approximation FC.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::paradigm::{run_stability_statistic, Collected, Wiring};
use super::{Route, StabilityConfig};
use crate::clusterer::Clusterer;
use crate::clustering::DistanceMatrix;
use crate::data::DataMatrix;
use crate::datagen::subsample;
use crate::error::{Error, Result};
use crate::measures::{CurveSeries, Prediction};
use crate::seed::{self, role, tag, ALL_K};

/// Stabilization threshold on the relative change of the CDF area.
pub const CONSENSUS_TAU: f64 = 0.05;

/// Co-clustering counts M and co-sampling counts I over n items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusState {
    n: usize,
    m: Vec<u32>,
    i: Vec<u32>,
}

impl ConsensusState {
    pub fn new(n: usize) -> Self {
        ConsensusState { n, m: vec![0; n * n], i: vec![0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds one round: `labels[p]` is the cluster of source row `rows[p]`.
    /// Repeated rows count once.
    pub fn add_round(&mut self, rows: &[usize], labels: &[usize]) {
        let mut seen = vec![false; self.n];
        let items: Vec<(usize, usize)> =
            rows.iter().zip(labels).filter(|(&r, _)| !core::mem::replace(&mut seen[r], true)).map(|(&r, &l)| (r, l)).collect();
        let n = self.n;
        for (p, &(a, la)) in items.iter().enumerate() {
            self.i[a * n + a] += 1;
            self.m[a * n + a] += 1;
            for &(b, lb) in &items[p + 1..] {
                self.i[a * n + b] += 1;
                self.i[b * n + a] += 1;
                if la == lb {
                    self.m[a * n + b] += 1;
                    self.m[b * n + a] += 1;
                }
            }
        }
    }

    /// Elementwise sum; the order of merges does not matter.
    pub fn merge(&mut self, other: &ConsensusState) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Structure("consensus states of different sizes".into()));
        }
        self.m.iter_mut().zip(&other.m).for_each(|(a, b)| *a += b);
        self.i.iter_mut().zip(&other.i).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// Rounds in which `a` and `b` were in the same cluster.
    pub fn connectivity(&self, a: usize, b: usize) -> u32 {
        self.m[a * self.n + b]
    }

    /// Rounds in which both `a` and `b` were sampled.
    pub fn cosampled(&self, a: usize, b: usize) -> u32 {
        self.i[a * self.n + b]
    }

    /// M/I, or `None` for a pair never sampled together.
    pub fn consensus(&self, a: usize, b: usize) -> Option<f64> {
        let i = self.cosampled(a, b);
        (i > 0).then(|| self.connectivity(a, b) as f64 / i as f64)
    }

    /// Pairs a < b that were never sampled together.
    pub fn undefined_pairs(&self) -> usize {
        (0..self.n).map(|a| (a + 1..self.n).filter(|&b| self.cosampled(a, b) == 0).count()).sum()
    }
}

/// Area under the empirical CDF of the defined upper-triangle consensus
/// entries, between the smallest and largest entry.
pub fn consensus_area(state: &ConsensusState) -> f64 {
    let n = state.n();
    let mut x: Vec<f64> = (0..n).flat_map(|a| (a + 1..n).filter_map(move |b| state.consensus(a, b))).collect();
    if x.len() < 2 {
        return 0.0;
    }
    x.sort_by(f64::total_cmp);
    let total = x.len() as f64;
    let mut area = 0.0;
    for i in 1..x.len() {
        if x[i] > x[i - 1] {
            // i entries are <= x[i-1]
            area += (x[i] - x[i - 1]) * i as f64 / total;
        }
    }
    area
}

/// Output of [`consensus_run`] and [`fc_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult {
    pub k_values: Vec<usize>,
    pub states: Vec<ConsensusState>,
    /// A(k).
    pub area: CurveSeries,
    /// Δ(k): A(2) at k=2, else (A(k+1) − A(k))/A(k).
    pub delta: CurveSeries,
    /// Δ with A′(k) = max over k′ ≤ k of A(k′).
    pub delta_prime: CurveSeries,
    pub prediction: Prediction,
}

impl ConsensusResult {
    pub fn state(&self, k: usize) -> Option<&ConsensusState> {
        self.k_values.iter().position(|&x| x == k).map(|i| &self.states[i])
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        (b - a) / a
    } else if b == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn delta_curve(ks: &[usize], a: &[f64]) -> Result<CurveSeries> {
    let mut kv = Vec::new();
    let mut v = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        if k == 2 {
            kv.push(k);
            v.push(a[i]);
        } else if i + 1 < ks.len() {
            kv.push(k);
            v.push(relative_change(a[i], a[i + 1]));
        }
    }
    CurveSeries::new(kv, v, None)
}

/// First index from which every relative change of `a` to its successor
/// stays within tau.
fn stable_from(a: &[f64]) -> Option<usize> {
    let r: Vec<f64> = a.windows(2).map(|w| relative_change(w[0], w[1])).collect();
    (0..r.len()).find(|&i| r[i..].iter().all(|x| x.abs() <= CONSENSUS_TAU))
}

pub(crate) fn finish(ks: Vec<usize>, states: Vec<ConsensusState>) -> Result<ConsensusResult> {
    let a: Vec<f64> = states.iter().map(consensus_area).collect();
    let mut running = f64::NEG_INFINITY;
    let a_prime: Vec<f64> = a.iter().map(|&x| {
        running = running.max(x);
        running
    }).collect();
    let delta = delta_curve(&ks, &a)?;
    let delta_prime = delta_curve(&ks, &a_prime)?;

    let mut prediction = match stable_from(&a) {
        Some(i) => Prediction::new(ks[i], "delta-stabilization", delta.clone()),
        None => {
            let mut p = Prediction::new(*ks.last().expect("non-empty k range"), "delta-stabilization", delta.clone());
            p.low_confidence = true;
            p.warn(format!("the area curve does not stabilize within tau={CONSENSUS_TAU}; using k_max"))
        }
    };
    if a.len() < 2 {
        prediction.low_confidence = true;
    }
    let undefined = states.first().map_or(0, |s| s.undefined_pairs());
    if undefined > 0 {
        prediction = prediction.warn(format!("{undefined} pairs were never sampled together and are left out"));
    }
    Ok(ConsensusResult {
        area: CurveSeries::new(ks.clone(), a, None)?,
        k_values: ks,
        states,
        delta,
        delta_prime,
        prediction,
    })
}

/// Consensus clustering: for every k, `cfg.h` subsamples of fraction
/// `cfg.beta` clustered at k by the first clusterer.
///
/// Seeds: subsample h at k from `task(seed, CONSENSUS, k, h, DGP, 0)`,
/// clustered with `task(seed, CONSENSUS, k, h, CLUSTER, 0)`.
pub fn consensus_run(d: &DataMatrix, cfg: &StabilityConfig) -> Result<ConsensusResult> {
    cfg.validate_for(d)?;
    let ks = cfg.ks();
    let mut states = Vec::with_capacity(ks.len());
    for &k in &ks {
        let mut st = ConsensusState::new(d.n());
        match cfg.route {
            Route::Native => {
                for h in 0..cfg.h as u64 {
                    let t = |r| seed::task(cfg.seed, tag::CONSENSUS, k as u64, h, r, 0);
                    let rows = subsample(d.n(), cfg.beta, t(role::DGP))?;
                    let p = cfg.clusterer().cluster(&d.select_rows(&rows)?, k, t(role::CLUSTER))?;
                    st.add_round(&rows, p.labels());
                }
            }
            Route::Paradigm => {
                for c in run_stability_statistic(d, cfg, k, &Wiring::consensus(cfg.beta))? {
                    if let Collected::CoClustering { rows, labels } = c {
                        st.add_round(&rows, &labels);
                    }
                }
            }
        }
        states.push(st);
    }
    finish(ks, states)
}

/// FC: `cfg.h` subsamples, each clustered once for all k (one tree per
/// subsample for hierarchical clusterers).
///
/// Seeds: subsample h from `task(seed, FC, ALL_K, h, DGP, 0)`, clustered at k
/// with `task(seed, FC, k, h, CLUSTER, 0)`.
pub fn fc_run(d: &DataMatrix, cfg: &StabilityConfig) -> Result<ConsensusResult> {
    cfg.validate_for(d)?;
    let ks = cfg.ks();
    let mut states: Vec<ConsensusState> = ks.iter().map(|_| ConsensusState::new(d.n())).collect();
    for h in 0..cfg.h as u64 {
        let rows = subsample(d.n(), cfg.beta, seed::task(cfg.seed, tag::FC, ALL_K, h, role::DGP, 0))?;
        let sub = d.select_rows(&rows)?;
        let parts = cfg.clusterer().cluster_all(&sub, &ks, |k| seed::task(cfg.seed, tag::FC, k as u64, h, role::CLUSTER, 0))?;
        for (st, p) in states.iter_mut().zip(&parts) {
            st.add_round(&rows, p.labels());
        }
    }
    finish(ks, states)
}

/// Nesting of the k and round loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopOrder {
    /// Rounds inside k, as in Consensus.
    PerK,
    /// k inside rounds, as in FC.
    PerRound,
}

/// Consensus over caller-given subsamples (`samples[h]` is used at every k);
/// round h is clustered at k with `task(seed, CONSENSUS, k, h, CLUSTER, 0)`
/// under either loop order.
pub fn consensus_with_samples(
    d: &DataMatrix,
    clusterer: &Clusterer,
    samples: &[Vec<usize>],
    ks: &[usize],
    order: LoopOrder,
    seed: u64,
) -> Result<ConsensusResult> {
    if ks.is_empty() || ks.windows(2).any(|w| w[1] != w[0] + 1) || ks[0] < 2 {
        return Err(Error::Parameter("k range must be consecutive and start at 2 or more".into()));
    }
    let cseed = |k: usize, h: usize| seed::task(seed, tag::CONSENSUS, k as u64, h as u64, role::CLUSTER, 0);
    let subs: Vec<DataMatrix> = samples.iter().map(|rows| d.select_rows(rows)).collect::<Result<_>>()?;
    let mut states: Vec<ConsensusState> = ks.iter().map(|_| ConsensusState::new(d.n())).collect();
    match order {
        LoopOrder::PerK => {
            for (st, &k) in states.iter_mut().zip(ks) {
                for (h, sub) in subs.iter().enumerate() {
                    st.add_round(&samples[h], clusterer.cluster(sub, k, cseed(k, h))?.labels());
                }
            }
        }
        LoopOrder::PerRound => {
            for (h, sub) in subs.iter().enumerate() {
                let parts = clusterer.cluster_all(sub, ks, |k| cseed(k, h))?;
                for (st, p) in states.iter_mut().zip(&parts) {
                    st.add_round(&samples[h], p.labels());
                }
            }
        }
    }
    finish(ks.to_vec(), states)
}

/// 1 − consensus at k as a distance; pairs never sampled together get 1.
pub fn consensus_to_distance(result: &ConsensusResult, k: usize) -> Result<DistanceMatrix> {
    let st = result.state(k).ok_or_else(|| Error::Parameter(format!("no consensus matrix for k={k}")))?;
    let mut undefined = 0usize;
    let dm = DistanceMatrix::from_fn(st.n(), |a, b| match st.consensus(a, b) {
        Some(c) => 1.0 - c,
        None => {
            undefined += 1;
            1.0
        }
    });
    if undefined > 0 {
        log::warn!("{undefined} pairs never sampled together; distance set to 1");
    }
    Ok(dm)
}
