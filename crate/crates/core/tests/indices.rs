use kstar_core::indices::{adjusted_rand, f_index, ContingencyTable, ExternalIndex};
use kstar_core::seed;
use proptest::prelude::*;
use rand::seq::SliceRandom;

const ALL: [ExternalIndex; 4] =
    [ExternalIndex::Rand, ExternalIndex::AdjustedRand, ExternalIndex::FowlkesMallows, ExternalIndex::F];

fn pair(n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (proptest::collection::vec(0usize..4, n), proptest::collection::vec(0usize..4, n))
}

fn relabel(l: &[usize], perm: &[usize]) -> Vec<usize> {
    l.iter().map(|&x| perm[x]).collect()
}

// one cluster or all singletons, where the chance correction is 0/0
fn trivial(l: &[usize]) -> bool {
    let k = kstar_core::Partition::from_labels(l).k();
    k == 1 || k == l.len()
}

fn defined(i: ExternalIndex, a: &[usize], b: &[usize]) -> Option<f64> {
    i.between(a, b).ok()
}

proptest! {
    #[test]
    fn invariant_to_relabeling((a, b) in (2usize..30).prop_flat_map(pair), perm in Just([0usize, 1, 2, 3]).prop_shuffle()) {
        for i in ALL {
            let x = defined(i, &a, &b);
            let y = defined(i, &relabel(&a, &perm), &b);
            prop_assert_eq!(x.is_some(), y.is_some());
            if let (Some(x), Some(y)) = (x, y) {
                prop_assert!((x - y).abs() < 1e-12, "{}: {} vs {}", i.name(), x, y);
            }
        }
    }

    #[test]
    fn symmetric_except_f((a, b) in (2usize..30).prop_flat_map(pair)) {
        for i in [ExternalIndex::Rand, ExternalIndex::AdjustedRand, ExternalIndex::FowlkesMallows] {
            if let (Some(x), Some(y)) = (defined(i, &a, &b), defined(i, &b, &a)) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_partitions_score_one(a in (2usize..30).prop_flat_map(|n| proptest::collection::vec(0usize..4, n))) {
        for i in ALL {
            if i == ExternalIndex::AdjustedRand && trivial(&a) {
                prop_assert_eq!(defined(i, &a, &a), Some(0.0));
                continue;
            }
            if let Some(x) = defined(i, &a, &a) {
                prop_assert!((x - 1.0).abs() < 1e-12, "{}: {}", i.name(), x);
            }
        }
    }

    #[test]
    fn ari_one_only_for_identical_groupings((a, b) in (2usize..12).prop_flat_map(pair)) {
        let t = ContingencyTable::from_labels(&a, &b).unwrap();
        if trivial(&a) || trivial(&b) {
            return Ok(());
        }
        if let Ok(x) = adjusted_rand(&t) {
            let same = kstar_core::Partition::from_labels(&a).same_grouping(&kstar_core::Partition::from_labels(&b));
            prop_assert_eq!((x - 1.0).abs() < 1e-12, same);
        }
    }
}

#[test]
fn f_index_is_asymmetric() {
    let a = [0, 0, 0, 0, 0, 1];
    let b = [0, 0, 0, 1, 1, 1];
    let ab = f_index(&ContingencyTable::from_labels(&a, &b).unwrap(), 1.0).unwrap();
    let ba = f_index(&ContingencyTable::from_labels(&b, &a).unwrap(), 1.0).unwrap();
    assert!((ab - ba).abs() > 1e-3, "{ab} {ba}");
}

#[test]
fn ari_has_zero_mean_under_permutation() {
    let a: Vec<usize> = (0..60).map(|i| i % 3).collect();
    let mut b: Vec<usize> = (0..60).map(|i| i / 15).collect();
    let mut rng = seed::rng(42);
    let mut sum = 0.0;
    for _ in 0..1000 {
        b.shuffle(&mut rng);
        sum += ExternalIndex::AdjustedRand.between(&a, &b).unwrap();
    }
    let mean = sum / 1000.0;
    assert!(mean.abs() < 0.02, "mean ARI {mean}");
}
