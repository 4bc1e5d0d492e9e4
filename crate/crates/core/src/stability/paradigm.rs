//! The generic resampling loop.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{Classifier, StabilityConfig};
use crate::data::{DataMatrix, Partition};
use crate::datagen::{apply_dgp, ceil_count, DgpSpec};
use crate::error::{Error, Result};
use crate::indices::ExternalIndex;
use crate::matching::match_labels;
use crate::measures::wcss;
use crate::seed::{self, role, ALL_K, ORIGINAL};

/// Redraws allowed when an iteration leaves nothing to compare.
pub(crate) const MAX_RETRIES: u64 = 10;

/// Iteration coordinate of attempt `attempt` of iteration `h`.
pub(crate) fn attempt_coord(h: u64, attempt: u64) -> u64 {
    h | (attempt << 40)
}

/// Random training/learning split of `n` rows: ⌈αn⌉ training rows, the rest
/// learning. Both lists are sorted.
pub fn split(n: usize, alpha: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng(seed));
    let t = ceil_count(alpha * n as f64).min(n);
    let mut train = idx[..t].to_vec();
    let mut learn = idx[t..].to_vec();
    train.sort_unstable();
    learn.sort_unstable();
    (train, learn)
}

/// How one partition of an iteration is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Procedure {
    /// Clusterer `i` of the configuration.
    Cluster(usize),
    /// Classifier trained in slot `i` of [`Wiring::train`].
    Classify(usize),
}

/// The statistic computed from the partitions of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Collector {
    /// Index between partitions 0 and 1 over their common source rows.
    IndexOnCommonRows(ExternalIndex),
    /// Partition 0 with its source rows.
    CoClustering,
    /// Among source pairs co-clustered by partition 0 and both present in
    /// partition 1, the fraction also co-clustered by partition 1.
    PairAgreement,
    /// Partition 1 relabeled to best match partition 0 on its rows.
    AlignedVotes,
    /// Misclassification of partition 0 against partition 1 after matching,
    /// divided by 1 − 1/k.
    Misclassification,
    /// Log-WCSS of every partition on its own rows (`None` when WCSS is 0).
    LogWcss,
}

/// One element of the statistic set.
#[derive(Debug, Clone, PartialEq)]
pub enum Collected {
    Value(f64),
    CoClustering { rows: Vec<usize>, labels: Vec<usize> },
    Votes { rows: Vec<usize>, labels: Vec<usize> },
    LogWcss(Vec<Option<f64>>),
}

/// An instance of the paradigm. Datasets are numbered with the original
/// data first (when included), then the generated ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Wiring {
    /// Seed tag of the instance.
    pub tag: u64,
    pub include_original: bool,
    /// Number of datasets generated per iteration.
    pub generated: usize,
    /// Generation procedure; `None` takes the configuration's.
    pub dgp: Option<DgpSpec>,
    /// Generated datasets do not depend on k.
    pub shared_draws: bool,
    /// Split every dataset into training and learning rows with the
    /// configuration's `alpha`.
    pub split: bool,
    /// `(dataset, clusterer)`: a classifier fitted to the clusterer's
    /// partition of the dataset's training rows.
    pub train: Vec<(usize, usize)>,
    /// `(dataset, procedure)`: partitions of the dataset's learning rows.
    pub assign: Vec<(usize, Procedure)>,
    pub collector: Collector,
}

impl Wiring {
    /// Two subsamples, one clusterer, index on the common rows.
    pub fn me(beta: f64, index: ExternalIndex) -> Self {
        Wiring {
            tag: seed::tag::ME,
            include_original: false,
            generated: 2,
            dgp: Some(DgpSpec::Subsample(beta)),
            shared_draws: false,
            split: false,
            train: Vec::new(),
            assign: alloc::vec![(0, Procedure::Cluster(0)), (1, Procedure::Cluster(0))],
            collector: Collector::IndexOnCommonRows(index),
        }
    }

    /// One subsample clustered per iteration; the connectivity is collected.
    pub fn consensus(beta: f64) -> Self {
        Self::co_clustering(seed::tag::CONSENSUS, beta)
    }

    pub fn bagclust2(beta: f64) -> Self {
        Self::co_clustering(seed::tag::BAGCLUST2, beta)
    }

    fn co_clustering(tag: u64, beta: f64) -> Self {
        Wiring {
            tag,
            include_original: false,
            generated: 1,
            dgp: Some(DgpSpec::Subsample(beta)),
            shared_draws: false,
            split: false,
            train: Vec::new(),
            assign: alloc::vec![(0, Procedure::Cluster(0))],
            collector: Collector::CoClustering,
        }
    }

    /// Original data and one subsample; agreement on co-clustered pairs.
    pub fn levine_domany(beta: f64) -> Self {
        Wiring {
            tag: seed::tag::LEVINE_DOMANY,
            include_original: true,
            generated: 1,
            dgp: Some(DgpSpec::Subsample(beta)),
            shared_draws: false,
            split: false,
            train: Vec::new(),
            assign: alloc::vec![(0, Procedure::Cluster(0)), (1, Procedure::Cluster(0))],
            collector: Collector::PairAgreement,
        }
    }

    /// Original data and one bootstrap sample; aligned votes.
    pub fn bagclust1() -> Self {
        Wiring {
            tag: seed::tag::BAGCLUST1,
            include_original: true,
            generated: 1,
            dgp: Some(DgpSpec::Bootstrap),
            shared_draws: false,
            split: false,
            train: Vec::new(),
            assign: alloc::vec![(0, Procedure::Cluster(0)), (1, Procedure::Cluster(0))],
            collector: Collector::AlignedVotes,
        }
    }

    /// Classifier from the training rows against the clusterer on the
    /// learning rows of the original data.
    pub fn clest(index: ExternalIndex) -> Self {
        Self::supervised(seed::tag::CLEST, Collector::IndexOnCommonRows(index))
    }

    pub fn roth() -> Self {
        Self::supervised(seed::tag::ROTH, Collector::Misclassification)
    }

    fn supervised(tag: u64, collector: Collector) -> Self {
        Wiring {
            tag,
            include_original: true,
            generated: 0,
            dgp: None,
            shared_draws: false,
            split: true,
            train: alloc::vec![(0, 0)],
            assign: alloc::vec![(0, Procedure::Classify(0)), (0, Procedure::Cluster(0))],
            collector,
        }
    }

    /// Original data and `l` null datasets shared by all k; log-WCSS of each.
    pub fn gap(null: crate::datagen::NullModel, l: usize) -> Self {
        Wiring {
            tag: seed::tag::GAP,
            include_original: true,
            generated: l,
            dgp: Some(DgpSpec::Null(null)),
            shared_draws: true,
            split: false,
            train: Vec::new(),
            assign: (0..=l).map(|t| (t, Procedure::Cluster(0))).collect(),
            collector: Collector::LogWcss,
        }
    }

    fn datasets(&self) -> usize {
        self.generated + usize::from(self.include_original)
    }

    fn check(&self, cfg: &StabilityConfig) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::Configuration(msg));
        let nd = self.datasets();
        for &(t, c) in &self.train {
            if t >= nd || c >= cfg.clusterers.len() {
                return bad(format!("training slot ({t}, {c}) refers to a missing dataset or clusterer"));
            }
        }
        for &(t, p) in &self.assign {
            if t >= nd {
                return bad(format!("assignment refers to dataset {t} of {nd}"));
            }
            match p {
                Procedure::Cluster(c) if c >= cfg.clusterers.len() => {
                    return bad(format!("clusterer {c} requested, {} configured", cfg.clusterers.len()))
                }
                Procedure::Classify(q) if q >= self.train.len() => {
                    return bad(format!("classifier {q} requested, {} trained", self.train.len()))
                }
                _ => {}
            }
        }
        let needed = match self.collector {
            Collector::CoClustering => 1,
            Collector::LogWcss => 1,
            _ => 2,
        };
        if self.assign.len() < needed {
            return bad(format!("collector needs {needed} partitions, wiring makes {}", self.assign.len()));
        }
        if !self.train.is_empty() && !(self.split && cfg.alpha > 0.0) {
            return bad("classifier training needs a split with alpha > 0".into());
        }
        Ok(())
    }
}

struct Dataset {
    matrix: DataMatrix,
    /// Source row of every row of `matrix`.
    rows: Vec<usize>,
    train: Option<Vec<usize>>,
    learn: Vec<usize>,
    original: bool,
}

struct Assigned {
    labels: Vec<usize>,
    k: usize,
    /// Source rows of the labelled rows.
    rows: Vec<usize>,
    dataset: usize,
}

enum Outcome {
    Done(Collected),
    Redraw,
}

/// Runs `cfg.h` iterations of `wiring` at cluster count `k` and returns the
/// collected statistic of each.
pub fn run_stability_statistic(d: &DataMatrix, cfg: &StabilityConfig, k: usize, wiring: &Wiring) -> Result<Vec<Collected>> {
    cfg.validate()?;
    wiring.check(cfg)?;
    if k < 1 || k > d.n() {
        return Err(Error::Parameter(format!("k={k} outside [1, {}]", d.n())));
    }
    let mut out = Vec::with_capacity(cfg.h);
    for h in 0..cfg.h as u64 {
        let mut attempt = 0;
        loop {
            match iteration(d, cfg, k, wiring, attempt_coord(h, attempt))? {
                Outcome::Done(c) => {
                    out.push(c);
                    break;
                }
                Outcome::Redraw if attempt + 1 < MAX_RETRIES => attempt += 1,
                Outcome::Redraw => {
                    return Err(Error::Size(format!("iteration {h}: nothing to compare after {MAX_RETRIES} draws")))
                }
            }
        }
    }
    Ok(out)
}

fn iteration(d: &DataMatrix, cfg: &StabilityConfig, k: usize, w: &Wiring, it: u64) -> Result<Outcome> {
    let task = |k: u64, iter: u64, role: u64, index: u64| seed::task(cfg.seed, w.tag, k, iter, role, index);
    let k64 = k as u64;
    let draw_k = if w.shared_draws { ALL_K } else { k64 };

    let mut data = Vec::with_capacity(w.datasets());
    if w.include_original {
        data.push(Dataset { matrix: d.clone(), rows: (0..d.n()).collect(), train: None, learn: Vec::new(), original: true });
    }
    let dgp = w.dgp.as_ref().unwrap_or(&cfg.dgp);
    for j in 0..w.generated as u64 {
        let g = apply_dgp(d, dgp, task(draw_k, it, role::DGP, j))?;
        g.warnings.iter().for_each(|m| log::warn!("{m}"));
        data.push(Dataset { matrix: g.matrix, rows: g.kept_rows, train: None, learn: Vec::new(), original: false });
    }
    for (t, ds) in data.iter_mut().enumerate() {
        if w.split && cfg.alpha > 0.0 {
            let (train, learn) = split(ds.matrix.n(), cfg.alpha, task(draw_k, it, role::SPLIT, t as u64));
            ds.train = Some(train);
            ds.learn = learn;
        } else {
            ds.learn = (0..ds.matrix.n()).collect();
        }
    }
    let learning: Vec<DataMatrix> = data
        .iter()
        .map(|ds| if ds.train.is_some() { ds.matrix.select_rows(&ds.learn) } else { Ok(ds.matrix.clone()) })
        .collect::<Result<_>>()?;

    let mut classifiers = Vec::with_capacity(w.train.len());
    for (q, &(t, c)) in w.train.iter().enumerate() {
        let ds = &data[t];
        let tm = ds.matrix.select_rows(ds.train.as_ref().expect("split present"))?;
        let p = cfg.clusterers[c].cluster(&tm, k, task(k64, it, role::TRAIN, q as u64))?;
        classifiers.push(Classifier::train(&tm, p.labels(), p.k())?);
    }

    let mut parts = Vec::with_capacity(w.assign.len());
    for (a, &(t, proc_)) in w.assign.iter().enumerate() {
        let ds = &data[t];
        let lm = &learning[t];
        let (labels, kk) = match proc_ {
            Procedure::Cluster(c) => {
                let coord = if ds.original && ds.train.is_none() { ORIGINAL } else { it };
                let p = cfg.clusterers[c].cluster(lm, k, task(k64, coord, role::CLUSTER, a as u64))?;
                let kk = p.k();
                (p.labels().to_vec(), kk)
            }
            Procedure::Classify(q) => (classifiers[q].predict(lm)?, classifiers[q].classes()),
        };
        let rows = ds.learn.iter().map(|&i| ds.rows[i]).collect();
        parts.push(Assigned { labels, k: kk, rows, dataset: t });
    }
    collect(w.collector, &parts, &learning, k)
}

/// Positions in `a` and `b` of the source rows present in both (first
/// occurrence of repeated rows).
fn common_positions(a: &[usize], b: &[usize]) -> Vec<(usize, usize)> {
    let mut first_b = alloc::collections::BTreeMap::new();
    for (q, &r) in b.iter().enumerate() {
        first_b.entry(r).or_insert(q);
    }
    let mut seen = alloc::collections::BTreeSet::new();
    a.iter()
        .enumerate()
        .filter(|(_, r)| seen.insert(**r))
        .filter_map(|(p, r)| first_b.get(r).map(|&q| (p, q)))
        .collect()
}

fn collect(c: Collector, parts: &[Assigned], learning: &[DataMatrix], k: usize) -> Result<Outcome> {
    let done = |x| Ok(Outcome::Done(x));
    match c {
        Collector::IndexOnCommonRows(index) => {
            let pos = common_positions(&parts[0].rows, &parts[1].rows);
            if pos.len() < 2 {
                return Ok(Outcome::Redraw);
            }
            let a: Vec<usize> = pos.iter().map(|&(p, _)| parts[0].labels[p]).collect();
            let b: Vec<usize> = pos.iter().map(|&(_, q)| parts[1].labels[q]).collect();
            done(Collected::Value(index.between(&a, &b)?))
        }
        Collector::CoClustering => {
            done(Collected::CoClustering { rows: parts[0].rows.clone(), labels: parts[0].labels.clone() })
        }
        Collector::PairAgreement => {
            let base = &parts[0];
            let mut base_of = alloc::collections::BTreeMap::new();
            for (p, &r) in base.rows.iter().enumerate() {
                base_of.entry(r).or_insert(base.labels[p]);
            }
            done(Collected::Value(pair_agreement(&base_of, &parts[1].rows, &parts[1].labels)))
        }
        Collector::AlignedVotes => {
            let (base, round) = (&parts[0], &parts[1]);
            let mut base_of = alloc::collections::BTreeMap::new();
            for (p, &r) in base.rows.iter().enumerate() {
                base_of.entry(r).or_insert(base.labels[p]);
            }
            let first: Vec<usize> = round.rows.iter().map(|r| base_of[r]).collect();
            let m = match_labels(&first, base.k, &round.labels, round.k)?;
            done(Collected::Votes { rows: round.rows.clone(), labels: m.relabeled })
        }
        Collector::Misclassification => {
            let pos = common_positions(&parts[0].rows, &parts[1].rows);
            if pos.is_empty() {
                return Ok(Outcome::Redraw);
            }
            let a: Vec<usize> = pos.iter().map(|&(p, _)| parts[0].labels[p]).collect();
            let b: Vec<usize> = pos.iter().map(|&(_, q)| parts[1].labels[q]).collect();
            done(Collected::Value(normalized_misclassification(&a, parts[0].k, &b, parts[1].k, k)?))
        }
        Collector::LogWcss => done(Collected::LogWcss(
            parts
                .iter()
                .map(|p| {
                    let w = wcss(&learning[p.dataset], &Partition::from_raw(p.labels.clone(), p.k));
                    if w > 0.0 { Some(libm::log(w)) } else { None }
                })
                .collect(),
        )),
    }
}

/// Levine–Domany agreement of one round; 1 when no pair qualifies.
pub(crate) fn pair_agreement(
    base_of: &alloc::collections::BTreeMap<usize, usize>,
    rows: &[usize],
    labels: &[usize],
) -> f64 {
    let (mut pairs, mut kept) = (0u64, 0u64);
    for p in 0..rows.len() {
        for q in p + 1..rows.len() {
            if rows[p] == rows[q] {
                continue;
            }
            if base_of[&rows[p]] == base_of[&rows[q]] {
                pairs += 1;
                if labels[p] == labels[q] {
                    kept += 1;
                }
            }
        }
    }
    if pairs == 0 { 1.0 } else { kept as f64 / pairs as f64 }
}

/// Fraction of items outside the best label matching, over 1 − 1/k.
pub(crate) fn normalized_misclassification(
    predicted: &[usize],
    kp: usize,
    clustered: &[usize],
    kc: usize,
    k: usize,
) -> Result<f64> {
    if k < 2 {
        return Err(Error::Parameter("misclassification normalization needs k >= 2".into()));
    }
    let m = match_labels(clustered, kc, predicted, kp)?;
    let rate = 1.0 - m.overlap as f64 / predicted.len() as f64;
    Ok(rate / (1.0 - 1.0 / k as f64))
}
