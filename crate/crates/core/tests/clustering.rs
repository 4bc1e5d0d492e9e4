use kstar_core::clusterer::{Clusterer, Start, KMEANS_NITER};
use kstar_core::clustering::{build_dendrogram, cut_dendrogram, euclidean_distances, kmeans, KMeansInit, Linkage};
use kstar_core::indices::ExternalIndex;
use kstar_core::synth::gen_two_clouds;
use kstar_core::DataMatrix;
use proptest::prelude::*;

fn rows(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, 2), n)
}

fn linkage() -> impl Strategy<Value = Linkage> {
    prop_oneof![Just(Linkage::Average), Just(Linkage::Complete), Just(Linkage::Single)]
}

proptest! {
    #[test]
    fn cuts_are_nested(r in (2usize..=15).prop_flat_map(rows), l in linkage()) {
        let tree = build_dendrogram(&euclidean_distances(&DataMatrix::from_rows(&r).unwrap()), l);
        let n = r.len();
        for k in 2..=n {
            let fine = cut_dendrogram(&tree, k).unwrap();
            let coarse = cut_dendrogram(&tree, k - 1).unwrap();
            prop_assert_eq!(fine.k(), k);
            // every fine cluster sits inside one coarse cluster
            for members in fine.members() {
                let c = coarse.label(members[0]);
                prop_assert!(members.iter().all(|&i| coarse.label(i) == c));
            }
        }
    }

    #[test]
    fn kmeans_partitions_are_valid(r in (6usize..=20).prop_flat_map(rows), k in 1usize..=5, seed in any::<u64>()) {
        let d = DataMatrix::from_rows(&r).unwrap();
        let p = kmeans(&d, k, &KMeansInit::Random, KMEANS_NITER, seed).unwrap();
        prop_assert_eq!(p.n(), r.len());
        prop_assert!(p.k() <= k);
        prop_assert!(p.labels().iter().all(|&l| l < p.k()));
        prop_assert!(p.sizes().iter().all(|&s| s > 0));
    }
}

#[test]
fn kmeans_is_deterministic_per_seed() {
    let (d, _) = gen_two_clouds(20, 3, 3.0, 9).unwrap();
    let c = Clusterer::KMeans { start: Start::Random, niter: KMEANS_NITER };
    for seed in 0..5 {
        assert_eq!(c.cluster(&d, 4, seed).unwrap(), c.cluster(&d, 4, seed).unwrap());
    }
}

#[test]
fn every_algorithm_recovers_two_clouds() {
    let (d, gold) = gen_two_clouds(25, 4, 6.0, 3).unwrap();
    let clusterers = [
        Clusterer::Hier(Linkage::Average),
        Clusterer::Hier(Linkage::Complete),
        Clusterer::Hier(Linkage::Single),
        Clusterer::KMeans { start: Start::Random, niter: KMEANS_NITER },
        Clusterer::KMeans { start: Start::Hier(Linkage::Average), niter: KMEANS_NITER },
    ];
    for c in &clusterers {
        let p = c.cluster(&d, 2, 11).unwrap();
        let ari = ExternalIndex::AdjustedRand.between(p.labels(), gold.labels()).unwrap();
        assert_eq!(ari, 1.0, "{}", c.name());
    }
}

#[test]
fn k_larger_than_n_is_rejected() {
    let d = DataMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
    assert!(Clusterer::hier_a().cluster(&d, 3, 0).is_err());
    assert!(kmeans(&d, 3, &KMeansInit::Random, 10, 0).is_err());
}
