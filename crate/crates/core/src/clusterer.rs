//! Uniform dispatch over the clustering algorithms.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::clustering::{build_dendrogram, cut_dendrogram, euclidean_distances, kmeans, Dendrogram, KMeansInit, Linkage};
use crate::data::{DataMatrix, Partition};
use crate::error::{Error, Result};
use crate::measures::wcss_r_path;
use crate::nmf::{nmf_cluster, NmfStart, NmfVariant, StopRule};

/// How a partitional algorithm is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Start {
    Random,
    /// From the cut of a hierarchical clustering with this linkage.
    Hier(Linkage),
}

/// A clustering algorithm with its parameters. Stochastic members take the
/// seed passed to [`Clusterer::cluster`].
#[derive(Debug, Clone, PartialEq)]
pub enum Clusterer {
    Hier(Linkage),
    KMeans { start: Start, niter: usize },
    Nmf { variant: NmfVariant, stop: StopRule, start: Start, shift: bool },
    /// The WCSS-R descent: K-means at `k_max`, then centroid merges with a
    /// K-means refresh whenever k is a multiple of `refresh`.
    WcssRefresh { refresh: usize, k_max: usize, niter: usize },
}

/// Default cap on Lloyd iterations.
pub const KMEANS_NITER: usize = 100;

fn linkage_code(l: Linkage) -> char {
    match l {
        Linkage::Average => 'a',
        Linkage::Complete => 'c',
        Linkage::Single => 's',
    }
}

impl Clusterer {
    pub fn hier_a() -> Self {
        Clusterer::Hier(Linkage::Average)
    }

    /// Short identifier such as `hier-a`, `kmeans-r` or `nmf-lin-a`.
    pub fn name(&self) -> String {
        let start = |s: &Start| match s {
            Start::Random => 'r',
            Start::Hier(l) => linkage_code(*l),
        };
        match self {
            Clusterer::Hier(l) => format!("hier-{}", linkage_code(*l)),
            Clusterer::KMeans { start: s, .. } => format!("kmeans-{}", start(s)),
            Clusterer::Nmf { variant, start: s, .. } => {
                let v = match variant {
                    NmfVariant::Multiplicative => "mult",
                    NmfVariant::LinModified { .. } => "lin",
                    NmfVariant::Als => "als",
                };
                format!("nmf-{v}-{}", start(s))
            }
            Clusterer::WcssRefresh { refresh, .. } => format!("wcss-r{refresh}"),
        }
    }

    pub fn is_hierarchical(&self) -> bool {
        matches!(self, Clusterer::Hier(_))
    }

    fn check_k(d: &DataMatrix, k: usize) -> Result<()> {
        if k < 1 || k > d.n() {
            return Err(Error::Parameter(format!("k={k} outside [1, {}]", d.n())));
        }
        Ok(())
    }

    fn with_tree(&self, d: &DataMatrix, tree: Option<&Dendrogram>, k: usize, seed: u64) -> Result<Partition> {
        Self::check_k(d, k)?;
        if k == 1 {
            return Ok(Partition::single(d.n()));
        }
        let hier_start = |l: Linkage| -> Result<Partition> {
            match tree {
                Some(t) => cut_dendrogram(t, k),
                None => cut_dendrogram(&build_dendrogram(&euclidean_distances(d), l), k),
            }
        };
        match self {
            Clusterer::Hier(l) => hier_start(*l),
            Clusterer::KMeans { start, niter } => {
                let init = match start {
                    Start::Random => KMeansInit::Random,
                    Start::Hier(l) => KMeansInit::FromPartition(hier_start(*l)?),
                };
                kmeans(d, k, &init, *niter, seed)
            }
            Clusterer::Nmf { variant, stop, start, shift } => {
                let init = match start {
                    Start::Random => NmfStart::Random,
                    Start::Hier(l) => NmfStart::FromPartition(hier_start(*l)?),
                };
                nmf_cluster(d, k, *variant, *stop, &init, *shift, seed).map(|c| c.partition)
            }
            Clusterer::WcssRefresh { refresh, k_max, niter } => {
                if k > *k_max {
                    return Err(Error::Parameter(format!("k={k} above the descent start {k_max}")));
                }
                let mut path = wcss_r_path(d, *refresh, (*k_max).min(d.n()), *niter, seed)?;
                Ok(path.swap_remove(k - 1))
            }
        }
    }

    fn tree_linkage(&self) -> Option<Linkage> {
        match self {
            Clusterer::Hier(l) => Some(*l),
            Clusterer::KMeans { start: Start::Hier(l), .. } | Clusterer::Nmf { start: Start::Hier(l), .. } => Some(*l),
            _ => None,
        }
    }

    /// Partition of the rows of `d` into `k` clusters.
    pub fn cluster(&self, d: &DataMatrix, k: usize, seed: u64) -> Result<Partition> {
        self.with_tree(d, None, k, seed)
    }

    /// Partitions for every k in `ks`, with `seed_of(k)` as the seed for k.
    /// Hierarchical trees are built once; the WCSS-R descent runs once with
    /// the seed of the largest k. Results equal per-k [`Clusterer::cluster`]
    /// calls except for that descent.
    pub fn cluster_all(&self, d: &DataMatrix, ks: &[usize], seed_of: impl Fn(usize) -> u64) -> Result<Vec<Partition>> {
        if let Clusterer::WcssRefresh { refresh, k_max, niter } = self {
            let top = ks.iter().copied().max().unwrap_or(1);
            if top > *k_max {
                return Err(Error::Parameter(format!("k={top} above the descent start {k_max}")));
            }
            Self::check_k(d, top)?;
            let path = wcss_r_path(d, *refresh, top, *niter, seed_of(top))?;
            return ks.iter().map(|&k| Self::check_k(d, k).map(|_| path[k - 1].clone())).collect();
        }
        let tree = self.tree_linkage().map(|l| build_dendrogram(&euclidean_distances(d), l));
        ks.iter().map(|&k| self.with_tree(d, tree.as_ref(), k, seed_of(k))).collect()
    }

    /// The tree of a hierarchical clusterer on `d`; `None` for other algorithms.
    pub fn dendrogram(&self, d: &DataMatrix) -> Option<Dendrogram> {
        match self {
            Clusterer::Hier(l) => Some(build_dendrogram(&euclidean_distances(d), *l)),
            _ => None,
        }
    }
}
