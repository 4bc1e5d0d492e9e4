//! Null models and data generation/perturbation procedures (DGPs).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::data::{DataMatrix, Partition};
use crate::error::{Error, Result};
use crate::seed;

/// Structure-free reference distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullModel {
    /// Each column permuted independently across rows.
    Permutational,
    /// Uniform over each feature's observed range.
    PoissonBox,
    /// Uniform over the box aligned with the principal components.
    PoissonPc,
    /// Each feature drawn from a normal with its observed mean and sd.
    Unimodal,
}

/// A data generation/perturbation procedure.
#[derive(Debug, Clone, PartialEq)]
pub enum DgpSpec {
    Null(NullModel),
    /// ⌈βn⌉ rows without replacement.
    Subsample(f64),
    /// ⌈β|c|⌉ rows from every cluster c of the strata.
    StratifiedSubsample { beta: f64, strata: Partition },
    /// Additive Gaussian noise with variance the median per-row variance.
    NoiseInject,
    /// Gaussian random projection for distortion ε.
    RandomProject(f64),
    /// n rows with replacement.
    Bootstrap,
}

/// Output of [`apply_dgp`].
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub matrix: DataMatrix,
    /// Source row of every output row (identity unless rows were resampled).
    pub kept_rows: Vec<usize>,
    pub warnings: Vec<String>,
}

/// ⌈x⌉ that ignores floating-point noise just above an integer.
pub fn ceil_count(x: f64) -> usize {
    libm::ceil(x - 1e-9) as usize
}

fn check_fraction(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Parameter(format!("{name} must be in (0,1), got {x}")));
    }
    Ok(())
}

/// Runs the procedure `spec` on `d`.
pub fn apply_dgp(d: &DataMatrix, spec: &DgpSpec, seed: u64) -> Result<Generated> {
    let identity = || (0..d.n()).collect::<Vec<_>>();
    let plain = |matrix| Generated { matrix, kept_rows: identity(), warnings: Vec::new() };
    match spec {
        DgpSpec::Null(NullModel::Permutational) => Ok(plain(null_permutational(d, seed))),
        DgpSpec::Null(NullModel::PoissonBox) => Ok(plain(null_poisson_box(d, seed))),
        DgpSpec::Null(NullModel::PoissonPc) => Ok(plain(null_poisson_pc(d, seed)?)),
        DgpSpec::Null(NullModel::Unimodal) => Ok(plain(null_unimodal(d, seed))),
        DgpSpec::Subsample(beta) => {
            let rows = subsample(d.n(), *beta, seed)?;
            Ok(Generated { matrix: d.select_rows(&rows)?, kept_rows: rows, warnings: Vec::new() })
        }
        DgpSpec::StratifiedSubsample { beta, strata } => {
            if strata.n() != d.n() {
                return Err(Error::Structure("strata do not cover the data rows".into()));
            }
            let rows = stratified_subsample(strata, *beta, seed)?;
            Ok(Generated { matrix: d.select_rows(&rows)?, kept_rows: rows, warnings: Vec::new() })
        }
        DgpSpec::NoiseInject => Ok(plain(noise_inject(d, seed))),
        DgpSpec::RandomProject(eps) => {
            let (matrix, warning) = random_project(d, *eps, seed)?;
            Ok(Generated { matrix, kept_rows: identity(), warnings: warning.into_iter().collect() })
        }
        DgpSpec::Bootstrap => {
            let rows = bootstrap(d.n(), seed);
            Ok(Generated { matrix: d.select_rows(&rows)?, kept_rows: rows, warnings: Vec::new() })
        }
    }
}

/// Permutes every column independently.
pub fn null_permutational(d: &DataMatrix, seed: u64) -> DataMatrix {
    let (n, m) = (d.n(), d.m());
    let mut rng = seed::rng(seed);
    let mut values = vec![0.0; n * m];
    for j in 0..m {
        let mut col = d.column(j);
        col.shuffle(&mut rng);
        for (i, v) in col.into_iter().enumerate() {
            values[i * m + j] = v;
        }
    }
    DataMatrix::new(values, n, m).expect("same shape")
}

fn ranges(values: &[f64], n: usize, m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|j| {
            (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                let v = values[i * m + j];
                (lo.min(v), hi.max(v))
            })
        })
        .collect()
}

fn box_sample(bounds: &[(f64, f64)], n: usize, rng: &mut seed::Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * bounds.len());
    for _ in 0..n {
        for &(lo, hi) in bounds {
            out.push(if hi > lo { lo + (hi - lo) * rng.random::<f64>() } else { lo });
        }
    }
    out
}

/// Uniform draws inside each feature's [min, max].
pub fn null_poisson_box(d: &DataMatrix, seed: u64) -> DataMatrix {
    let bounds = ranges(d.values(), d.n(), d.m());
    let mut rng = seed::rng(seed);
    DataMatrix::new(box_sample(&bounds, d.n(), &mut rng), d.n(), d.m()).expect("same shape")
}

/// Box-uniform draws in principal-component coordinates, rotated back and
/// shifted to the column means.
pub fn null_poisson_pc(d: &DataMatrix, seed: u64) -> Result<DataMatrix> {
    let (n, m) = (d.n(), d.m());
    let means: Vec<f64> = (0..m).map(|j| (0..n).map(|i| d.get(i, j)).sum::<f64>() / n as f64).collect();
    let x = DMatrix::from_fn(n, m, |i, j| d.get(i, j) - means[j]);
    let svd = x.clone().try_svd(false, true, f64::EPSILON, 0).ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD returned no right singular vectors".into()))?;
    let rotated = &x * vt.transpose();
    let r = rotated.ncols();
    let flat: Vec<f64> = (0..n).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| rotated[(i, j)]).collect();
    let bounds = ranges(&flat, n, r);
    let mut rng = seed::rng(seed);
    let sample = DMatrix::from_row_slice(n, r, &box_sample(&bounds, n, &mut rng));
    let back = sample * vt;
    let mut values = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            values.push(back[(i, j)] + means[j]);
        }
    }
    DataMatrix::new(values, n, m)
}

/// Per-feature normal draws with the observed mean and sample sd.
pub fn null_unimodal(d: &DataMatrix, seed: u64) -> DataMatrix {
    let (n, m) = (d.n(), d.m());
    let stats: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let col = d.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            (mean, libm::sqrt(var))
        })
        .collect();
    let mut rng = seed::rng(seed);
    let mut values = Vec::with_capacity(n * m);
    for _ in 0..n {
        for &(mean, sd) in &stats {
            values.push(if sd > 0.0 { mean + sd * rng.sample::<f64, _>(StandardNormal) } else { mean });
        }
    }
    DataMatrix::new(values, n, m).expect("same shape")
}

/// ⌈βn⌉ distinct row indices in increasing order.
pub fn subsample(n: usize, beta: f64, seed: u64) -> Result<Vec<usize>> {
    check_fraction("beta", beta)?;
    let size = ceil_count(beta * n as f64).max(1);
    let mut rng = seed::rng(seed);
    let mut rows = rand::seq::index::sample(&mut rng, n, size).into_vec();
    rows.sort_unstable();
    Ok(rows)
}

/// ⌈β|c|⌉ rows from every cluster of `strata`, in increasing order.
pub fn stratified_subsample(strata: &Partition, beta: f64, seed: u64) -> Result<Vec<usize>> {
    check_fraction("beta", beta)?;
    let mut rng = seed::rng(seed);
    let mut rows = Vec::new();
    for members in strata.members() {
        let size = ceil_count(beta * members.len() as f64);
        for idx in rand::seq::index::sample(&mut rng, members.len(), size) {
            rows.push(members[idx]);
        }
    }
    rows.sort_unstable();
    Ok(rows)
}

/// n row indices drawn with replacement, sorted.
pub fn bootstrap(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let mut rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    rows.sort_unstable();
    rows
}

/// Median over rows of the per-row sample variance.
pub fn median_row_variance(d: &DataMatrix) -> f64 {
    let m = d.m();
    let mut vars: Vec<f64> = (0..d.n())
        .map(|i| {
            if m < 2 {
                return 0.0;
            }
            let row = d.row(i);
            let mean = row.iter().sum::<f64>() / m as f64;
            row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64
        })
        .collect();
    vars.sort_by(f64::total_cmp);
    let k = vars.len();
    if k % 2 == 1 { vars[k / 2] } else { 0.5 * (vars[k / 2 - 1] + vars[k / 2]) }
}

/// Adds N(0, σ²) noise with σ² the median per-row variance.
pub fn noise_inject(d: &DataMatrix, seed: u64) -> DataMatrix {
    let sd = libm::sqrt(median_row_variance(d));
    if sd == 0.0 {
        return d.clone();
    }
    let mut rng = seed::rng(seed);
    let values = d.values().iter().map(|&v| v + sd * rng.sample::<f64, _>(StandardNormal)).collect();
    DataMatrix::new(values, d.n(), d.m()).expect("same shape")
}

/// Target dimension ⌈4 ln n / (ε²/2 − ε³/3)⌉ of the Johnson–Lindenstrauss bound.
pub fn jl_dimension(n: usize, epsilon: f64) -> usize {
    let e2 = epsilon * epsilon;
    libm::ceil(4.0 * libm::log(n as f64) / (e2 / 2.0 - e2 * epsilon / 3.0)) as usize
}

/// Projects rows onto m′ Gaussian directions scaled by 1/√m′. When m′ ≥ m
/// the data is returned unchanged together with a warning.
pub fn random_project(d: &DataMatrix, epsilon: f64, seed: u64) -> Result<(DataMatrix, Option<String>)> {
    check_fraction("epsilon", epsilon)?;
    let (n, m) = (d.n(), d.m());
    let target = jl_dimension(n, epsilon);
    if target >= m {
        let msg = format!("projection dimension {target} >= {m} features; identity projection used");
        log::warn!("{msg}");
        return Ok((d.clone(), Some(msg)));
    }
    let mut rng = seed::rng(seed);
    let scale = 1.0 / libm::sqrt(target as f64);
    let proj: Vec<f64> = (0..m * target).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    let mut values = vec![0.0; n * target];
    for i in 0..n {
        let out = &mut values[i * target..(i + 1) * target];
        for (f, &x) in d.row(i).iter().enumerate() {
            for (o, &p) in out.iter_mut().zip(&proj[f * target..(f + 1) * target]) {
                *o += x * p;
            }
        }
    }
    Ok((DataMatrix::new(values, n, target)?, None))
}
