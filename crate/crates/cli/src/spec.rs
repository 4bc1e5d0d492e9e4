//! Textual names of clusterers and measures, and the options they take.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use kstar_core::clusterer::{Clusterer, Start, KMEANS_NITER};
use kstar_core::clustering::Linkage;
use kstar_core::datagen::NullModel;
use kstar_core::indices::ExternalIndex;
use kstar_core::nmf::{NmfVariant, StopRule};

use crate::error::{CliError, CliResult};

fn linkage(code: &str) -> Option<Linkage> {
    match code {
        "a" => Some(Linkage::Average),
        "c" => Some(Linkage::Complete),
        "s" => Some(Linkage::Single),
        _ => None,
    }
}

fn start(code: &str) -> Option<Start> {
    if code == "r" { Some(Start::Random) } else { linkage(code).map(Start::Hier) }
}

pub const CLUSTERER_NAMES: &str =
    "hier-{a,c,s}, kmeans-{r,a,c,s}, nmf-{mult,lin,als}-{r,a,c,s} (append +shift to allow negative data)";

/// `hier-a`, `kmeans-r`, `nmf-lin-c`, `nmf-mult-r+shift`, ...
pub fn parse_clusterer(s: &str) -> CliResult<Clusterer> {
    let bad = || CliError::usage(format!("unknown clusterer {s:?}; valid: {CLUSTERER_NAMES}"));
    let (base, shift) = match s.strip_suffix("+shift") {
        Some(b) => (b, true),
        None => (s, false),
    };
    let parts: Vec<&str> = base.split('-').collect();
    match parts.as_slice() {
        ["hier", l] if !shift => linkage(l).map(Clusterer::Hier).ok_or_else(bad),
        ["kmeans", st] if !shift => start(st).map(|start| Clusterer::KMeans { start, niter: KMEANS_NITER }).ok_or_else(bad),
        ["nmf", v, st] => {
            let variant = match *v {
                "mult" => NmfVariant::Multiplicative,
                "lin" => NmfVariant::lin(),
                "als" => NmfVariant::Als,
                _ => return Err(bad()),
            };
            let start = start(st).ok_or_else(bad)?;
            Ok(Clusterer::Nmf { variant, stop: StopRule::default(), start, shift })
        }
        _ => Err(bad()),
    }
}

pub fn parse_null(s: &str) -> CliResult<NullModel> {
    match s {
        "pr" | "permutational" => Ok(NullModel::Permutational),
        "ps" | "poisson-box" => Ok(NullModel::PoissonBox),
        "pc" | "poisson-pc" => Ok(NullModel::PoissonPc),
        "unimodal" => Ok(NullModel::Unimodal),
        _ => Err(CliError::usage(format!("unknown null model {s:?}; valid: pr, ps, pc, unimodal"))),
    }
}

pub fn null_name(n: NullModel) -> &'static str {
    match n {
        NullModel::Permutational => "pr",
        NullModel::PoissonBox => "ps",
        NullModel::PoissonPc => "pc",
        NullModel::Unimodal => "unimodal",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureKind {
    /// WCSS curve, knee detection.
    WcssKnee,
    /// WCSS curve, Krzanowski–Lai.
    Kl,
    Gap,
    /// Geometric approximation of Gap on the WCSS curve.
    GGap,
    /// WCSS-R merge descent, knee detection.
    WcssR,
    FomKnee,
    DiffFom,
    GFom,
    /// FOM-R merge descent, knee detection.
    FomR,
    Consensus,
    Fc,
    Me,
    Clest,
    LevineDomany,
    Roth,
}

const MEASURES: [(MeasureKind, &str); 15] = [
    (MeasureKind::WcssKnee, "wcss"),
    (MeasureKind::Kl, "kl"),
    (MeasureKind::Gap, "gap"),
    (MeasureKind::GGap, "g-gap"),
    (MeasureKind::WcssR, "wcss-r"),
    (MeasureKind::FomKnee, "fom"),
    (MeasureKind::DiffFom, "diff-fom"),
    (MeasureKind::GFom, "g-fom"),
    (MeasureKind::FomR, "fom-r"),
    (MeasureKind::Consensus, "consensus"),
    (MeasureKind::Fc, "fc"),
    (MeasureKind::Me, "me"),
    (MeasureKind::Clest, "clest"),
    (MeasureKind::LevineDomany, "ld"),
    (MeasureKind::Roth, "roth"),
];

impl MeasureKind {
    pub fn name(self) -> &'static str {
        MEASURES.iter().find(|(k, _)| *k == self).map(|(_, n)| *n).expect("every kind is listed")
    }

    /// Measures whose curve starts at k=1 and ignores `k_min`.
    pub fn from_one(self) -> bool {
        !matches!(self, MeasureKind::Consensus | MeasureKind::Fc | MeasureKind::Me | MeasureKind::Clest
            | MeasureKind::LevineDomany | MeasureKind::Roth)
    }

    /// Measures that run their own K-means merge descent.
    fn needs_kmeans(self) -> bool {
        matches!(self, MeasureKind::WcssR | MeasureKind::FomR)
    }
}

impl FromStr for MeasureKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        MEASURES.iter().find(|(_, n)| *n == s).map(|(k, _)| *k).ok_or_else(|| {
            let names: Vec<&str> = MEASURES.iter().map(|(_, n)| *n).collect();
            CliError::usage(format!("unknown measure {s:?}; valid: {}", names.join(", ")))
        })
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rejects measure/clusterer pairs that cannot run together.
pub fn check_compatible(kind: MeasureKind, clusterer: &Clusterer) -> CliResult<()> {
    if kind.needs_kmeans() && !matches!(clusterer, Clusterer::KMeans { .. }) {
        return Err(CliError::usage(format!(
            "{kind} runs its own K-means descent and needs a kmeans-* clusterer, got {}; \
             valid combinations: wcss-r and fom-r with kmeans-{{r,a,c,s}}, every other measure with any clusterer",
            clusterer.name()
        )));
    }
    Ok(())
}

/// Tunable settings of a measure run. Defaults follow the benchmark protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOptions {
    pub k_min: usize,
    pub k_max: usize,
    /// Resampling rounds for consensus, FC, ME, Levine–Domany and Roth.
    pub h: usize,
    /// Subsample fraction.
    pub beta: f64,
    pub gap_steps: usize,
    pub gap_l: usize,
    pub null: NullModel,
    /// Resampling rounds for Clest.
    pub clest_h: usize,
    pub clest_b0: usize,
    pub clest_p_max: f64,
    pub clest_d_min: f64,
    pub index: ExternalIndex,
    /// Refresh cadence of WCSS-R / FOM-R.
    pub refresh: usize,
    /// Offset of the geometric approximations.
    pub offset: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            k_min: 2,
            k_max: 30,
            h: 250,
            beta: 0.8,
            gap_steps: 20,
            gap_l: 10,
            null: NullModel::PoissonBox,
            clest_h: 20,
            clest_b0: 20,
            clest_p_max: 0.05,
            clest_d_min: 0.05,
            index: ExternalIndex::AdjustedRand,
            refresh: 2,
            offset: 0.0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.parse().map_err(|_| CliError::usage(format!("{key}: cannot parse {value:?}")))
}

impl MeasureOptions {
    pub const KEYS: [&'static str; 14] = [
        "k_min", "k_max", "h", "beta", "gap_steps", "gap_l", "null", "clest_h", "clest_b0", "clest_p_max",
        "clest_d_min", "index", "refresh", "offset",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "k_min" => self.k_min = parse_num(key, value)?,
            "k_max" => self.k_max = parse_num(key, value)?,
            "h" => self.h = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "gap_steps" => self.gap_steps = parse_num(key, value)?,
            "gap_l" => self.gap_l = parse_num(key, value)?,
            "null" => self.null = parse_null(value)?,
            "clest_h" => self.clest_h = parse_num(key, value)?,
            "clest_b0" => self.clest_b0 = parse_num(key, value)?,
            "clest_p_max" => self.clest_p_max = parse_num(key, value)?,
            "clest_d_min" => self.clest_d_min = parse_num(key, value)?,
            "index" => {
                self.index = ExternalIndex::parse(value)
                    .ok_or_else(|| CliError::usage(format!("unknown index {value:?}; valid: rand, adjusted-rand, fm, f")))?
            }
            "refresh" => self.refresh = parse_num(key, value)?,
            "offset" => self.offset = parse_num(key, value)?,
            _ => return Err(CliError::usage(format!("unknown option {key:?}; valid: {}", Self::KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Every setting as `key=value`, enough to rerun the measure.
    pub fn record(&self) -> BTreeMap<&'static str, String> {
        let mut r = BTreeMap::new();
        r.insert("k_min", self.k_min.to_string());
        r.insert("k_max", self.k_max.to_string());
        r.insert("h", self.h.to_string());
        r.insert("beta", self.beta.to_string());
        r.insert("gap_steps", self.gap_steps.to_string());
        r.insert("gap_l", self.gap_l.to_string());
        r.insert("null", null_name(self.null).to_string());
        r.insert("clest_h", self.clest_h.to_string());
        r.insert("clest_b0", self.clest_b0.to_string());
        r.insert("clest_p_max", self.clest_p_max.to_string());
        r.insert("clest_d_min", self.clest_d_min.to_string());
        r.insert("index", self.index.name().to_string());
        r.insert("refresh", self.refresh.to_string());
        r.insert("offset", self.offset.to_string());
        r
    }
}
