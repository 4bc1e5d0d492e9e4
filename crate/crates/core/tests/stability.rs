mod support;

use kstar_core::clusterer::{Clusterer, Start, KMEANS_NITER};
use kstar_core::datagen::NullModel;
use kstar_core::indices::ExternalIndex;
use kstar_core::measures::wcss;
use kstar_core::stability::*;
use kstar_core::synth::{gen_gaussian_cloud, gen_two_clouds};
use kstar_core::{seed, DataMatrix, Partition};
use proptest::prelude::*;

fn cfg(k_max: usize, h: usize, seed: u64) -> StabilityConfig {
    let mut c = StabilityConfig::new(Clusterer::hier_a(), 2, k_max, seed);
    c.h = h;
    c
}

#[test]
fn paradigm_routes_match_native_code() {
    for (name, r) in support::suites::paradigm_suite() {
        assert!(r.is_ok(), "{name}: {}", r.unwrap_err());
    }
}

#[test]
fn me_on_two_clouds() {
    let (d, _) = gen_two_clouds(30, 4, 6.0, 1).unwrap();
    let r = me_run(&d, &cfg(5, 40, 3)).unwrap();
    let at = |k: usize| &r.values[r.k_values.iter().position(|&x| x == k).unwrap()];
    let high = at(2).iter().filter(|&&v| v > 0.9).count() as f64 / at(2).len() as f64;
    assert!(high >= 0.9, "fraction above 0.9 at k=2: {high}");
    let sd = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    assert!(sd(at(5)) > sd(at(2)));
    assert!(r.histograms.iter().all(|h| h.len() == ME_BINS && h.iter().sum::<u64>() == 40));
}

#[test]
fn clest_separates_one_and_two_clouds() {
    let params = ClestParams { b0: 10, ..ClestParams::default() };
    let (two, _) = gen_two_clouds(25, 4, 6.0, 2).unwrap();
    let mut c = cfg(5, 10, 4);
    c.alpha = CLEST_TRAIN_FRACTION;
    assert_eq!(clest_run(&two, &c, &params).unwrap().prediction.k_star, 2);
    let one = gen_gaussian_cloud(50, 4, 6).unwrap();
    assert_eq!(clest_run(&one, &c, &params).unwrap().prediction.k_star, 1);
}

#[test]
fn levine_domany_is_stable_at_two() {
    let (d, _) = gen_two_clouds(30, 4, 6.0, 3).unwrap();
    let p = levine_domany_run(&d, &cfg(5, 20, 5)).unwrap();
    assert!(p.evidence.value_at(2).unwrap() > 0.99);
    assert_eq!(p.k_star, 2);
}

#[test]
fn roth_prefers_two_clouds() {
    let (d, _) = gen_two_clouds(30, 4, 6.0, 4).unwrap();
    let mut c = cfg(5, 20, 6);
    c.alpha = ROTH_TRAIN_FRACTION;
    assert_eq!(roth_run(&d, &c).unwrap().k_star, 2);
}

#[test]
fn normalized_misclassification_of_random_labels_is_near_one() {
    // predicted and clustered labels drawn independently
    let mut rng = seed::rng(9);
    for k in [2usize, 3, 5] {
        let mut total = 0.0;
        for _ in 0..200 {
            let a = support::oracles::random_labels(&mut rng, 300, k);
            let b = support::oracles::random_labels(&mut rng, 300, k);
            let (pa, pb) = (Partition::from_labels(&a), Partition::from_labels(&b));
            let m = kstar_core::matching::max_overlap_matching(&pb, &pa).unwrap();
            let rate = 1.0 - m.overlap as f64 / 300.0;
            total += rate / (1.0 - 1.0 / k as f64);
        }
        let mean = total / 200.0;
        assert!((mean - 1.0).abs() < 0.1, "k={k}: {mean}");
    }
}

#[test]
fn bagclust1_reproduces_clear_clusters() {
    let (d, gold) = gen_two_clouds(20, 3, 8.0, 5).unwrap();
    let p = bagclust1(&d, &cfg(4, 15, 7), 2).unwrap();
    assert_eq!(ExternalIndex::AdjustedRand.between(p.labels(), gold.labels()).unwrap(), 1.0);
}

#[test]
fn bagclust2_dissimilarity_separates_clouds() {
    let (d, gold) = gen_two_clouds(15, 3, 8.0, 6).unwrap();
    let r = bagclust2(&d, &cfg(4, 30, 8), 2).unwrap();
    let (mut within, mut between) = (0.0f64, f64::INFINITY);
    for a in 0..d.n() {
        for b in a + 1..d.n() {
            let x = r.dissimilarity.get(a, b);
            if gold.labels()[a] == gold.labels()[b] { within = within.max(x) } else { between = between.min(x) }
        }
    }
    assert!(within < between, "{within} vs {between}");
    assert_eq!(ExternalIndex::AdjustedRand.between(r.partition.labels(), gold.labels()).unwrap(), 1.0);
}

#[test]
fn consensus_invariants() {
    let (d, _) = gen_two_clouds(15, 3, 3.0, 7).unwrap();
    let r = consensus_run(&d, &cfg(6, 25, 9)).unwrap();
    for (s, &k) in r.states.iter().zip(&r.k_values) {
        for a in 0..d.n() {
            for b in 0..d.n() {
                assert!(s.connectivity(a, b) <= s.cosampled(a, b));
                assert_eq!(s.connectivity(a, b), s.connectivity(b, a));
                assert_eq!(s.cosampled(a, b), s.cosampled(b, a));
            }
        }
        let area = r.area.value_at(k).unwrap();
        assert!((0.0..=1.0).contains(&area));
    }
    assert_eq!(r.delta.value_at(2), r.area.value_at(2));
}

#[test]
fn consensus_distance_recovers_clusters() {
    let (d, gold) = gen_two_clouds(15, 3, 8.0, 8).unwrap();
    let r = consensus_run(&d, &cfg(4, 20, 10)).unwrap();
    let dist = consensus_to_distance(&r, 2).unwrap();
    let tree = kstar_core::clustering::build_dendrogram(&dist, kstar_core::clustering::Linkage::Average);
    let p = kstar_core::clustering::cut_dendrogram(&tree, 2).unwrap();
    assert_eq!(ExternalIndex::AdjustedRand.between(p.labels(), gold.labels()).unwrap(), 1.0);
}

#[test]
fn fc_counts_every_round_once() {
    let (d, _) = gen_two_clouds(10, 2, 3.0, 9).unwrap();
    let mut c = cfg(4, 12, 11);
    c.beta = 0.99;
    let r = fc_run(&d, &c).unwrap();
    for s in &r.states {
        // with β close to 1 every row is drawn in every round
        assert!((0..d.n()).all(|i| s.cosampled(i, i) == 12));
    }
}

#[test]
fn mecca_flags_real_structure() {
    let r2 = |d: &DataMatrix, p: &Partition| 1.0 - wcss(d, p) / wcss(d, &Partition::single(d.n()));
    let c = Clusterer::KMeans { start: Start::Random, niter: KMEANS_NITER };
    let mut hits = 0;
    for s in 0..10 {
        let (d, _) = gen_two_clouds(20, 3, 5.0, 100 + s).unwrap();
        let m = mecca(&d, &c, 2, 40, &r2, 0.05, NullModel::PoissonPc, s).unwrap();
        assert_eq!(m.null_values.len(), 40);
        hits += m.significant as usize;
    }
    assert!(hits >= 9, "{hits}/10");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn per_k_and_per_round_agree_for_one_round(seed in any::<u64>(), rows in proptest::collection::btree_set(0usize..20, 4..20)) {
        let (d, _) = gen_two_clouds(10, 2, 2.0, 12).unwrap();
        let samples = vec![rows.into_iter().collect::<Vec<_>>()];
        let ks = [2usize, 3, 4];
        let c = Clusterer::hier_a();
        let a = consensus_with_samples(&d, &c, &samples, &ks, LoopOrder::PerK, seed).unwrap();
        let b = consensus_with_samples(&d, &c, &samples, &ks, LoopOrder::PerRound, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn consensus_entries_stay_in_unit_interval(seed in any::<u64>()) {
        let (d, _) = gen_two_clouds(8, 2, 1.0, seed).unwrap();
        let r = consensus_run(&d, &cfg(4, 5, seed)).unwrap();
        for s in &r.states {
            for a in 0..d.n() {
                for b in 0..d.n() {
                    if let Some(x) = s.consensus(a, b) {
                        prop_assert!((0.0..=1.0).contains(&x));
                    }
                }
            }
        }
    }
}
