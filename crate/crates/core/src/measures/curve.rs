use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Prediction returned when a rule finds no cluster structure.
pub const NO_STRUCTURE: usize = 1;

/// Values of a measure over increasing k, with optional dispersion.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    k_values: Vec<usize>,
    values: Vec<f64>,
    dispersion: Option<Vec<f64>>,
}

impl CurveSeries {
    pub fn new(k_values: Vec<usize>, values: Vec<f64>, dispersion: Option<Vec<f64>>) -> Result<Self> {
        if k_values.len() != values.len() || dispersion.as_ref().is_some_and(|d| d.len() != values.len()) {
            return Err(Error::Structure("curve lengths disagree".into()));
        }
        if k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structure("k values must be strictly increasing".into()));
        }
        Ok(CurveSeries { k_values, values, dispersion })
    }

    /// A curve over k = 1, 2, …, values.len().
    pub fn from_one(values: Vec<f64>) -> Self {
        let k_values = (1..=values.len()).collect();
        CurveSeries { k_values, values, dispersion: None }
    }

    pub fn k_values(&self) -> &[usize] {
        &self.k_values
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dispersion(&self) -> Option<&[f64]> {
        self.dispersion.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, k: usize) -> Option<f64> {
        self.k_values.binary_search(&k).ok().map(|i| self.values[i])
    }

    /// Requires the curve to cover 1..=k_max contiguously.
    pub(crate) fn require_from_one(&self, what: &str, min_len: usize) -> Result<()> {
        if self.len() < min_len {
            return Err(Error::Parameter(format!("{what} needs at least {min_len} points, got {}", self.len())));
        }
        if self.k_values.iter().enumerate().any(|(i, &k)| k != i + 1) {
            return Err(Error::Parameter(format!("{what} needs a curve over k = 1, 2, ...")));
        }
        Ok(())
    }
}

/// An estimate of the number of clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub k_star: usize,
    /// Identifier of the decision rule.
    pub rule: String,
    /// The curve the rule was applied to.
    pub evidence: CurveSeries,
    /// Set when the rule had nothing to discriminate on (e.g. a straight line).
    pub low_confidence: bool,
    pub warnings: Vec<String>,
}

impl Prediction {
    pub fn new(k_star: usize, rule: &str, evidence: CurveSeries) -> Self {
        Prediction { k_star, rule: rule.into(), evidence, low_confidence: false, warnings: Vec::new() }
    }

    pub(crate) fn warn(mut self, msg: String) -> Self {
        log::warn!("{msg}");
        self.warnings.push(msg);
        self
    }
}
