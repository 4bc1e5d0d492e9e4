//! Stability-based estimation of the number of clusters.
//!
//! Every method here is a wiring of one resampling loop,
//! [`run_stability_statistic`]. Each method also has a direct implementation;
//! [`StabilityConfig::route`] picks which one runs. Both routes derive the
//! same seeds and return bitwise-identical results.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::clusterer::Clusterer;
use crate::data::DataMatrix;
use crate::datagen::DgpSpec;
use crate::error::{Error, Result};
use crate::indices::ExternalIndex;

mod classifier;
mod consensus;
mod instances;
mod paradigm;

pub use classifier::Classifier;
pub use consensus::{
    consensus_area, consensus_run, consensus_to_distance, consensus_with_samples, fc_run, ConsensusResult,
    ConsensusState, LoopOrder, CONSENSUS_TAU,
};
pub use instances::{
    bagclust1, bagclust2, clest_run, gap_via_paradigm, levine_domany_run, me_run, mecca, roth_run, BagClust2Result,
    ClestParams, ClestResult, MeResult, MeccaResult, ME_BINS,
};
pub use paradigm::{run_stability_statistic, split, Collected, Collector, Procedure, Wiring};

/// Which implementation of a stability method runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Route {
    #[default]
    Native,
    /// Through [`run_stability_statistic`].
    Paradigm,
}

/// Default training fraction for Clest; the remaining 66% is the learning set.
pub const CLEST_TRAIN_FRACTION: f64 = 0.34;
/// Default training fraction for Roth et al.
pub const ROTH_TRAIN_FRACTION: f64 = 0.5;

/// Parameters shared by the stability methods.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Resampling iterations.
    pub h: usize,
    /// Subsample fraction.
    pub beta: f64,
    /// Training fraction of the training/learning split; 0 disables it.
    pub alpha: f64,
    pub dgp: DgpSpec,
    pub clusterers: Vec<Clusterer>,
    pub external_index: ExternalIndex,
    pub seed: u64,
    pub route: Route,
}

impl StabilityConfig {
    /// H=20, β=0.8, no split, subsampling DGP, Adjusted Rand.
    pub fn new(clusterer: Clusterer, k_min: usize, k_max: usize, seed: u64) -> Self {
        StabilityConfig {
            k_min,
            k_max,
            h: 20,
            beta: 0.8,
            alpha: 0.0,
            dgp: DgpSpec::Subsample(0.8),
            clusterers: vec![clusterer],
            external_index: ExternalIndex::AdjustedRand,
            seed,
            route: Route::Native,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(Error::Parameter(format!("need 2 <= k_min <= k_max, got [{}, {}]", self.k_min, self.k_max)));
        }
        if self.h < 1 {
            return Err(Error::Parameter("H must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Parameter(format!("beta must be in (0,1), got {}", self.beta)));
        }
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must be in [0,1), got {}", self.alpha)));
        }
        if self.clusterers.is_empty() {
            return Err(Error::Configuration("no clusterer given".into()));
        }
        Ok(())
    }

    pub(crate) fn validate_for(&self, d: &DataMatrix) -> Result<()> {
        self.validate()?;
        if self.k_max > d.n() {
            return Err(Error::Parameter(format!("k_max={} exceeds n={}", self.k_max, d.n())));
        }
        Ok(())
    }

    pub(crate) fn ks(&self) -> Vec<usize> {
        (self.k_min..=self.k_max).collect()
    }

    pub(crate) fn clusterer(&self) -> &Clusterer {
        &self.clusterers[0]
    }
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
