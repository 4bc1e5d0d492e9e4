use kstar_core::datagen::*;
use kstar_core::synth::gen_gaussian_cloud;
use kstar_core::{DataMatrix, Partition};
use proptest::prelude::*;

fn rows(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-50.0..50.0f64, m), n)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #[test]
    fn permutation_keeps_column_multisets(r in (2usize..20).prop_flat_map(|n| rows(n, 3)), seed in any::<u64>()) {
        let d = DataMatrix::from_rows(&r).unwrap();
        let p = null_permutational(&d, seed);
        for j in 0..3 {
            prop_assert_eq!(sorted(d.column(j)), sorted(p.column(j)));
        }
    }

    #[test]
    fn poisson_box_stays_in_range(r in (2usize..20).prop_flat_map(|n| rows(n, 3)), seed in any::<u64>()) {
        let d = DataMatrix::from_rows(&r).unwrap();
        let p = null_poisson_box(&d, seed);
        for j in 0..3 {
            let c = sorted(d.column(j));
            prop_assert!(p.column(j).iter().all(|&x| x >= c[0] && x <= c[c.len() - 1]));
        }
    }

    #[test]
    fn subsample_sizes(n in 1usize..200, beta in 0.01..0.99f64, seed in any::<u64>()) {
        let s = subsample(n, beta, seed).unwrap();
        prop_assert_eq!(s.len(), ceil_count(beta * n as f64).max(1));
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn stratified_subsample_sizes(labels in proptest::collection::vec(0usize..4, 1..60), beta in 0.05..0.95f64, seed in any::<u64>()) {
        let p = Partition::from_labels(&labels);
        let s = stratified_subsample(&p, beta, seed).unwrap();
        for (c, size) in p.sizes().into_iter().enumerate() {
            let got = s.iter().filter(|&&i| p.label(i) == c).count();
            prop_assert_eq!(got, ceil_count(beta * size as f64));
        }
    }

    #[test]
    fn generators_are_deterministic(r in (4usize..15).prop_flat_map(|n| rows(n, 2)), seed in any::<u64>()) {
        let d = DataMatrix::from_rows(&r).unwrap();
        for spec in [DgpSpec::Null(NullModel::Permutational), DgpSpec::Null(NullModel::PoissonBox),
                     DgpSpec::Null(NullModel::Unimodal), DgpSpec::Subsample(0.5), DgpSpec::NoiseInject, DgpSpec::Bootstrap] {
            prop_assert_eq!(apply_dgp(&d, &spec, seed).unwrap(), apply_dgp(&d, &spec, seed).unwrap());
        }
    }
}

fn moments(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (mean, (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt())
}

#[test]
fn unimodal_null_matches_column_moments() {
    let rows: Vec<Vec<f64>> = (0..4000).map(|i| vec![(i % 10) as f64 * 2.0 + 5.0, (i % 7) as f64 - 3.0]).collect();
    let d = DataMatrix::from_rows(&rows).unwrap();
    let u = null_unimodal(&d, 3);
    for j in 0..2 {
        let (m0, s0) = moments(&d.column(j));
        let (m1, s1) = moments(&u.column(j));
        assert!((m0 - m1).abs() < 0.05 * s0 && (s0 - s1).abs() < 0.05 * s0, "column {j}: {m0},{s0} vs {m1},{s1}");
    }
}

#[test]
fn noise_injection_has_median_row_variance() {
    let d = gen_gaussian_cloud(2000, 10, 1).unwrap();
    let target = median_row_variance(&d);
    let noisy = noise_inject(&d, 2);
    let diff: Vec<f64> = noisy.values().iter().zip(d.values()).map(|(a, b)| a - b).collect();
    let (mean, sd) = moments(&diff);
    assert!(mean.abs() < 0.02 && (sd * sd / target - 1.0).abs() < 0.03, "{mean} {sd} {target}");
}

#[test]
fn random_projection_preserves_most_distances() {
    let eps = 0.5;
    let d = gen_gaussian_cloud(50, 600, 5).unwrap();
    let sq = |m: &DataMatrix, a: usize, b: usize| m.row(a).iter().zip(m.row(b)).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    let mut good = 0;
    for seed in 0..20 {
        let (p, warning) = random_project(&d, eps, seed).unwrap();
        assert!(warning.is_none());
        assert_eq!(p.m(), jl_dimension(50, eps));
        let (mut inside, mut total) = (0, 0);
        for a in 0..50 {
            for b in a + 1..50 {
                let r = sq(&p, a, b) / sq(&d, a, b);
                total += 1;
                if (1.0 - eps..=1.0 + eps).contains(&r) {
                    inside += 1;
                }
            }
        }
        if inside == total {
            good += 1;
        }
    }
    assert!(good >= 14, "{good}/20 projections kept every distance");
}

#[test]
fn small_targets_fall_back_to_identity() {
    let d = gen_gaussian_cloud(20, 5, 0).unwrap();
    let (p, warning) = random_project(&d, 0.5, 0).unwrap();
    assert_eq!(p, d);
    assert!(warning.is_some());
}
