//! Fixed-seed suites. Each check returns `Err` with the first counterexample.

use kstar_core::clusterer::{Clusterer, Start};
use kstar_core::clustering::{build_dendrogram, cut_dendrogram, euclidean_distances, kmeans_traced, KMeansInit, Linkage};
use kstar_core::datagen::NullModel;
use kstar_core::indices::{fm_index, rand_index, ContingencyTable, ExternalIndex};
use kstar_core::matching::max_overlap_matching;
use kstar_core::measures::{g_gap_predict, gap_predict, wcss, wcss_r_curve, CurveSeries};
use kstar_core::nmf::{nmf_factorize, NmfInit, NmfVariant, StopRule};
use kstar_core::seed;
use kstar_core::stability::*;
use kstar_core::synth::gen_two_clouds;
use kstar_core::{stirling_partition_count, DataMatrix, Partition};
use rand::Rng;

use super::oracles::*;

pub type Check = (&'static str, Result<(), String>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

pub fn pair_count_check(cases: u64) -> Result<(), String> {
    let mut rng = seed::rng(101);
    for case in 0..cases {
        let n = rng.random_range(2..=10);
        let a = { let c = rng.random_range(1..=4); random_labels(&mut rng, n, c) };
        let b = { let c = rng.random_range(1..=4); random_labels(&mut rng, n, c) };
        let t = ContingencyTable::from_labels(&a, &b).map_err(|e| e.to_string())?;
        let p = t.pair_counts();
        let o = pair_counts(&a, &b);
        ensure([p.a, p.b, p.c, p.d] == o, || format!("case {case}: pair counts {:?} vs {o:?}", p))?;
        let r = rand_index(&t).unwrap();
        ensure(r == rand_from_pairs(o), || format!("case {case}: rand {r}"))?;
        if o[0] + o[1] > 0 && o[0] + o[2] > 0 {
            let fm = fm_index(&t).unwrap();
            ensure((fm - fm_from_pairs(o)).abs() <= 1e-12, || format!("case {case}: fm {fm}"))?;
        }
        let ari = ExternalIndex::AdjustedRand.between(&a, &b).unwrap();
        ensure((ari - ari_from_pairs(o)).abs() <= 1e-12, || format!("case {case}: ari {ari} vs {}", ari_from_pairs(o)))?;
    }
    Ok(())
}

pub fn wcss_check(cases: u64) -> Result<(), String> {
    let mut rng = seed::rng(102);
    for case in 0..cases {
        let n = rng.random_range(2..=10);
        let rows = { let c = rng.random_range(1..=4); random_rows(&mut rng, n, c) };
        let p = Partition::from_labels(&{ let c = rng.random_range(1..=n); random_labels(&mut rng, n, c) });
        let d = DataMatrix::from_rows(&rows).unwrap();
        let (w, o) = (wcss(&d, &p), wcss_pairwise(&rows, p.labels()));
        ensure((w - o).abs() <= 1e-9 * o.abs().max(1e-300), || format!("case {case}: {w} vs {o}"))?;
    }
    Ok(())
}

pub fn single_linkage_check(cases: u64) -> Result<(), String> {
    let mut rng = seed::rng(103);
    for case in 0..cases {
        let n = rng.random_range(2..=12);
        let rows = { let c = rng.random_range(1..=3); random_rows(&mut rng, n, c) };
        let d = DataMatrix::from_rows(&rows).unwrap();
        let tree = build_dendrogram(&euclidean_distances(&d), Linkage::Single);
        for k in 1..=n {
            let cut = cut_dendrogram(&tree, k).unwrap();
            let mst = Partition::from_labels(&mst_components(&rows, k));
            ensure(cut.same_grouping(&mst), || format!("case {case}, k={k}: {:?} vs {:?}", cut.labels(), mst.labels()))?;
        }
    }
    Ok(())
}

pub fn matching_check(cases: u64) -> Result<(), String> {
    let mut rng = seed::rng(104);
    for case in 0..cases {
        let n = rng.random_range(1..=8);
        let p1 = Partition::from_labels(&{ let c = rng.random_range(1..=4); random_labels(&mut rng, n, c) });
        let p2 = Partition::from_labels(&{ let c = rng.random_range(1..=4); random_labels(&mut rng, n, c) });
        let m = max_overlap_matching(&p1, &p2).map_err(|e| e.to_string())?;
        let o = best_overlap(p1.labels(), p1.k(), p2.labels(), p2.k());
        ensure(m.overlap == o, || format!("case {case}: overlap {} vs {o}", m.overlap))?;
        let agree = m.relabeled.iter().zip(p1.labels()).filter(|(a, b)| a == b).count();
        ensure(agree == o, || format!("case {case}: relabeling agrees on {agree}, expected {o}"))?;
    }
    Ok(())
}

pub fn stirling_check() -> Result<(), String> {
    for n in 1..=8u32 {
        let counts = partition_counts(n as usize);
        for k in 1..=n + 1 {
            let want = counts.get(k as usize).copied().unwrap_or(0);
            let got = stirling_partition_count(n, k).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("S({n},{k}) = {got}, enumeration {want}"))?;
        }
    }
    Ok(())
}

pub fn oracle_suite() -> Vec<Check> {
    vec![
        ("pair-count indices vs pair enumeration", pair_count_check(500)),
        ("wcss vs pairwise identity", wcss_check(300)),
        ("single linkage vs MST components", single_linkage_check(150)),
        ("label matching vs factorial search", matching_check(500)),
        ("Stirling numbers vs enumeration", stirling_check()),
    ]
}

fn non_increasing(trace: &[f64], rel: f64) -> Result<(), usize> {
    match trace.windows(2).position(|w| w[1] > w[0] + rel * w[0].abs()) {
        Some(i) => Err(i),
        None => Ok(()),
    }
}

pub fn nmf_trace_check(variant: NmfVariant, seeds: u64) -> Result<(), String> {
    let stop = StopRule { max_iterations: 300, relative_tolerance: 0.0, patience: 10 };
    for s in 0..seeds {
        let mut rng = seed::rng(200 + s);
        let v: Vec<f64> = (0..80).map(|_| rng.random_range(0.0..1.0)).collect();
        let f = nmf_factorize(&v, 10, 8, 3, variant, stop, &NmfInit::Random, s).map_err(|e| e.to_string())?;
        non_increasing(&f.objective_trace, 1e-9).map_err(|i| {
            format!("seed {s}: objective rose at step {i}: {} -> {}", f.objective_trace[i], f.objective_trace[i + 1])
        })?;
    }
    Ok(())
}

pub fn kmeans_trace_check(seeds: u64) -> Result<(), String> {
    for s in 0..seeds {
        let mut rng = seed::rng(300 + s);
        let d = DataMatrix::from_rows(&random_rows(&mut rng, 40, 3)).unwrap();
        let r = kmeans_traced(&d, 5, &KMeansInit::Random, 100, s).map_err(|e| e.to_string())?;
        if let Some(i) = r.objective_trace.windows(2).position(|w| w[1] > w[0] + 1e-12) {
            return Err(format!("seed {s}: objective rose at iteration {i}"));
        }
    }
    Ok(())
}

pub fn wcss_r_path_check(seeds: u64) -> Result<(), String> {
    for s in 0..seeds {
        let mut rng = seed::rng(400 + s);
        let d = DataMatrix::from_rows(&random_rows(&mut rng, 30, 2)).unwrap();
        let c = wcss_r_curve(&d, 0, 12, 100, s).map_err(|e| e.to_string())?;
        let v = c.values();
        // v[k-1] is WCSS at k; merging from k to k-1 must not lower it.
        if let Some(i) = (1..v.len()).find(|&i| v[i - 1] < v[i]) {
            return Err(format!("seed {s}: WCSS({}) = {} < WCSS({}) = {}", i, v[i - 1], i + 1, v[i]));
        }
    }
    Ok(())
}

pub fn g_gap_offset_check(seeds: u64) -> Result<(), String> {
    for s in 0..seeds {
        let mut rng = seed::rng(500 + s);
        let mut v: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..10.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let curve = CurveSeries::from_one(v);
        let base = g_gap_predict(&curve, 0.0).map_err(|e| e.to_string())?;
        for a in [-100.0, -1.5, 0.25, 3.0, 1e6] {
            let p = g_gap_predict(&curve, a).map_err(|e| e.to_string())?;
            ensure(p.k_star == base.k_star, || format!("seed {s}, a={a}: k*={} vs {}", p.k_star, base.k_star))?;
        }
    }
    Ok(())
}

pub fn monotonicity_suite() -> Vec<Check> {
    vec![
        ("NMF multiplicative objective non-increasing", nmf_trace_check(NmfVariant::Multiplicative, 10)),
        ("NMF Lin objective non-increasing", nmf_trace_check(NmfVariant::lin(), 10)),
        ("K-means objective non-increasing", kmeans_trace_check(20)),
        ("WCSS-R merge path non-decreasing as k falls", wcss_r_path_check(20)),
        ("G-Gap prediction invariant to offset", g_gap_offset_check(50)),
    ]
}

fn same<T: PartialEq + core::fmt::Debug>(what: &str, clusterer: &Clusterer, a: T, b: T) -> Result<(), String> {
    ensure(a == b, || format!("{what} with {}: native {a:?} differs from paradigm {b:?}", clusterer.name()))
}

/// Runs every stability method natively and through the paradigm loop on an
/// n=30 toy dataset and compares the results exactly.
pub fn paradigm_suite() -> Vec<Check> {
    let (d, _) = gen_two_clouds(15, 4, 2.5, 77).unwrap();
    let clusterers = [Clusterer::hier_a(), Clusterer::KMeans { start: Start::Random, niter: 100 }];
    let err = |e: kstar_core::Error| e.to_string();
    let run = |f: &dyn Fn(&StabilityConfig, &StabilityConfig, &Clusterer) -> Result<(), String>| {
        clusterers.iter().try_for_each(|c| {
            let mut native = StabilityConfig::new(c.clone(), 2, 5, 2024);
            native.h = 6;
            let mut wired = native.clone();
            wired.route = Route::Paradigm;
            f(&native, &wired, c)
        })
    };
    let supervised = |alpha: f64| {
        move |n: &StabilityConfig, w: &StabilityConfig| {
            let (mut n, mut w) = (n.clone(), w.clone());
            n.alpha = alpha;
            w.alpha = alpha;
            (n, w)
        }
    };
    vec![
        ("ME", run(&|n, w, c| same("ME", c, me_run(&d, n).map_err(err)?, me_run(&d, w).map_err(err)?))),
        ("Clest", run(&|n, w, c| {
            let (n, w) = supervised(CLEST_TRAIN_FRACTION)(n, w);
            let p = ClestParams { b0: 3, ..ClestParams::default() };
            same("Clest", c, clest_run(&d, &n, &p).map_err(err)?, clest_run(&d, &w, &p).map_err(err)?)
        })),
        ("Consensus", run(&|n, w, c| {
            same("Consensus", c, consensus_run(&d, n).map_err(err)?, consensus_run(&d, w).map_err(err)?)
        })),
        ("Levine-Domany", run(&|n, w, c| {
            same("Levine-Domany", c, levine_domany_run(&d, n).map_err(err)?, levine_domany_run(&d, w).map_err(err)?)
        })),
        ("Roth", run(&|n, w, c| {
            let (n, w) = supervised(ROTH_TRAIN_FRACTION)(n, w);
            same("Roth", c, roth_run(&d, &n).map_err(err)?, roth_run(&d, &w).map_err(err)?)
        })),
        ("BagClust1", run(&|n, w, c| {
            (2..=4).try_for_each(|k| same("BagClust1", c, bagclust1(&d, n, k).map_err(err)?, bagclust1(&d, w, k).map_err(err)?))
        })),
        ("BagClust2", run(&|n, w, c| {
            (2..=4).try_for_each(|k| same("BagClust2", c, bagclust2(&d, n, k).map_err(err)?, bagclust2(&d, w, k).map_err(err)?))
        })),
        ("Gap", run(&|_, _, c| {
            let a = gap_predict(&d, c, NullModel::PoissonBox, 4, 3, 5, 2024).map_err(err)?;
            let b = gap_via_paradigm(&d, c, NullModel::PoissonBox, 4, 3, 5, 2024).map_err(err)?;
            same("Gap", c, a, b)
        })),
    ]
}
