//! Non-negative matrix factorization V ≈ W·H and clustering by metagene
//! argmax.
//!
//! V is features × items (m×n), so a data matrix D (items × features) is
//! factorized as V = Dᵀ. W is m×r and H is r×n; item i belongs to the
//! metagene j maximizing H[j,i].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::data::{DataMatrix, Partition};
use crate::error::{Error, Result};
use crate::seed;

/// Update strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NmfVariant {
    /// Lee–Seung multiplicative updates, denominators guarded by 1e−12.
    Multiplicative,
    /// Lin's modified updates with W columns normalized to sum 1.
    LinModified { epsilon: f64, delta: f64 },
    /// Alternating least squares with projection onto the non-negative orthant.
    Als,
}

impl NmfVariant {
    pub fn lin() -> Self {
        NmfVariant::LinModified { epsilon: 1e-9, delta: 1e-12 }
    }
}

const MULT_DELTA: f64 = 1e-12;
const ALS_RIDGE: f64 = 1e-10;

/// Stop after `max_iterations`, or once the objective improved by less than
/// `relative_tolerance` (relative) over the last `patience` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    pub patience: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { max_iterations: 2000, relative_tolerance: 1e-6, patience: 10 }
    }
}

/// Initial factors.
#[derive(Debug, Clone, PartialEq)]
pub enum NmfInit {
    Random,
    /// Row-major W (m×r) and H (r×n).
    Given { w: Vec<f64>, h: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    /// Row-major m×r.
    pub w: Vec<f64>,
    /// Row-major r×n.
    pub h: Vec<f64>,
    /// Objective before the first update, then after each iteration.
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
}

#[derive(Clone)]
struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn t(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.at(i, j);
            }
        }
        out
    }

    fn mul(&self, b: &Mat) -> Mat {
        debug_assert_eq!(self.cols, b.rows);
        let mut out = Mat::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &bv) in orow.iter_mut().zip(&b.data[k * b.cols..(k + 1) * b.cols]) {
                    *o += a * bv;
                }
            }
        }
        out
    }
}

/// ½‖V − WH‖² evaluated entry by entry.
pub fn objective_direct(v: &[f64], w: &[f64], h: &[f64], m: usize, n: usize, r: usize) -> f64 {
    let wm = Mat { rows: m, cols: r, data: w.to_vec() };
    let hm = Mat { rows: r, cols: n, data: h.to_vec() };
    let wh = wm.mul(&hm);
    0.5 * v.iter().zip(&wh.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// ½(tr(VᵀV) − 2 tr(Hᵀ WᵀV) + tr(Hᵀ WᵀW H)).
pub fn objective_trace_form(v: &[f64], w: &[f64], h: &[f64], m: usize, n: usize, r: usize) -> f64 {
    let vm = Mat { rows: m, cols: n, data: v.to_vec() };
    let wm = Mat { rows: m, cols: r, data: w.to_vec() };
    let hm = Mat { rows: r, cols: n, data: h.to_vec() };
    let wt = wm.t();
    let wtv = wt.mul(&vm);
    let wtw = wt.mul(&wm);
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let cross: f64 = hm.data.iter().zip(&wtv.data).map(|(a, b)| a * b).sum();
    let wtwh = wtw.mul(&hm);
    let quad: f64 = hm.data.iter().zip(&wtwh.data).map(|(a, b)| a * b).sum();
    0.5 * (vv - 2.0 * cross + quad)
}

fn objective(v: &Mat, w: &Mat, h: &Mat) -> f64 {
    objective_direct(&v.data, &w.data, &h.data, v.rows, v.cols, w.cols)
}

fn multiplicative_step(v: &Mat, w: &mut Mat, h: &mut Mat) {
    let wt = w.t();
    let num = wt.mul(v);
    let den = wt.mul(w).mul(h);
    for ((x, a), b) in h.data.iter_mut().zip(&num.data).zip(&den.data) {
        *x *= a / (b + MULT_DELTA);
    }
    let ht = h.t();
    let num = v.mul(&ht);
    let den = w.mul(&h.mul(&ht));
    for ((x, a), b) in w.data.iter_mut().zip(&num.data).zip(&den.data) {
        *x *= a / (b + MULT_DELTA);
    }
}

fn lin_step(v: &Mat, w: &mut Mat, h: &mut Mat, eps: f64, delta: f64) {
    let bar = |x: &Mat, grad: &Mat| {
        let mut out = x.clone();
        for (o, &g) in out.data.iter_mut().zip(&grad.data) {
            if g < 0.0 {
                *o = o.max(eps);
            }
        }
        out
    };
    let wt = w.t();
    let wtw = wt.mul(w);
    let mut grad = wtw.mul(h);
    for (g, a) in grad.data.iter_mut().zip(&wt.mul(v).data) {
        *g -= a;
    }
    let hb = bar(h, &grad);
    let den = wtw.mul(&hb);
    for (((x, &b), &d), &g) in h.data.iter_mut().zip(&hb.data).zip(&den.data).zip(&grad.data) {
        *x = (*x - b / (d + delta) * g).max(0.0);
    }

    let ht = h.t();
    let hht = h.mul(&ht);
    let mut grad = w.mul(&hht);
    for (g, a) in grad.data.iter_mut().zip(&v.mul(&ht).data) {
        *g -= a;
    }
    let wb = bar(w, &grad);
    let den = wb.mul(&hht);
    for (((x, &b), &d), &g) in w.data.iter_mut().zip(&wb.data).zip(&den.data).zip(&grad.data) {
        *x = (*x - b / (d + delta) * g).max(0.0);
    }

    for a in 0..w.cols {
        let s: f64 = (0..w.rows).map(|i| w.at(i, a)).sum();
        if s > 0.0 {
            for i in 0..w.rows {
                w.data[i * w.cols + a] /= s;
            }
            for j in 0..h.cols {
                h.data[a * h.cols + j] *= s;
            }
        }
    }
}

/// Solves (G + λI) X = B for symmetric positive semi-definite G, with λ = 0
/// first and the ridge only if the plain factorization fails.
fn spd_solve(g: &Mat, b: &Mat) -> Result<Mat> {
    let gm = DMatrix::from_row_slice(g.rows, g.cols, &g.data);
    let bm = DMatrix::from_row_slice(b.rows, b.cols, &b.data);
    let chol = gm.clone().cholesky().or_else(|| {
        let ridge = gm + DMatrix::identity(g.rows, g.cols) * ALS_RIDGE;
        ridge.cholesky()
    });
    let chol = chol.ok_or_else(|| Error::Numerical("ALS normal equations are singular".into()))?;
    let x = chol.solve(&bm);
    let mut out = Mat::zeros(b.rows, b.cols);
    for i in 0..b.rows {
        for j in 0..b.cols {
            out.data[i * b.cols + j] = x[(i, j)];
        }
    }
    Ok(out)
}

fn als_step(v: &Mat, w: &mut Mat, h: &mut Mat) -> Result<()> {
    let wt = w.t();
    *h = spd_solve(&wt.mul(w), &wt.mul(v))?;
    h.data.iter_mut().for_each(|x| *x = x.max(0.0));
    let ht = h.t();
    let wt_new = spd_solve(&h.mul(&ht), &h.mul(&v.t()))?;
    *w = wt_new.t();
    w.data.iter_mut().for_each(|x| *x = x.max(0.0));
    Ok(())
}

/// Factorizes the non-negative m×n matrix `v` (row-major) at rank `r`.
#[allow(clippy::too_many_arguments)]
pub fn nmf_factorize(
    v: &[f64],
    m: usize,
    n: usize,
    r: usize,
    variant: NmfVariant,
    stop: StopRule,
    init: &NmfInit,
    seed: u64,
) -> Result<Factorization> {
    if v.len() != m * n {
        return Err(Error::Structure(format!("{} values for a {m}x{n} matrix", v.len())));
    }
    if let Some(p) = v.iter().position(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::Domain(format!("entry ({}, {}) is negative or not finite", p / n, p % n)));
    }
    if r < 1 || r >= m.min(n) {
        return Err(Error::Parameter(format!("rank {r} must be in [1, min(m,n)) = [1, {})", m.min(n))));
    }
    if stop.max_iterations < 1 || stop.relative_tolerance.is_nan() || stop.relative_tolerance < 0.0 {
        return Err(Error::Parameter("invalid stop rule".into()));
    }
    if let NmfVariant::LinModified { epsilon, delta } = variant {
        if !(epsilon > 0.0 && delta > 0.0) {
            return Err(Error::Parameter("Lin epsilon and delta must be positive".into()));
        }
    }
    let vm = Mat { rows: m, cols: n, data: v.to_vec() };
    let (mut w, mut h) = match init {
        NmfInit::Random => {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let scale = libm::sqrt(mean.max(f64::MIN_POSITIVE) / r as f64);
            let mut rng = seed::rng(seed);
            let mut draw = |len: usize| (0..len).map(|_| scale * (1.0 - rng.random::<f64>())).collect::<Vec<_>>();
            let w = draw(m * r);
            let h = draw(r * n);
            (Mat { rows: m, cols: r, data: w }, Mat { rows: r, cols: n, data: h })
        }
        NmfInit::Given { w, h } => {
            if w.len() != m * r || h.len() != r * n {
                return Err(Error::Structure("initial factors have the wrong shape".into()));
            }
            if w.iter().chain(h.iter()).any(|&x| x.is_nan() || x < 0.0) {
                return Err(Error::Domain("initial factors must be non-negative".into()));
            }
            (Mat { rows: m, cols: r, data: w.clone() }, Mat { rows: r, cols: n, data: h.clone() })
        }
    };

    let mut trace = vec![objective(&vm, &w, &h)];
    let mut it = 0;
    while it < stop.max_iterations {
        match variant {
            NmfVariant::Multiplicative => multiplicative_step(&vm, &mut w, &mut h),
            NmfVariant::LinModified { epsilon, delta } => lin_step(&vm, &mut w, &mut h, epsilon, delta),
            NmfVariant::Als => als_step(&vm, &mut w, &mut h)?,
        }
        it += 1;
        let f = objective(&vm, &w, &h);
        trace.push(f);
        if f == 0.0 {
            break;
        }
        if it >= stop.patience {
            let old = trace[it - stop.patience];
            if (old - f).abs() <= stop.relative_tolerance * old.abs() {
                break;
            }
        }
    }
    Ok(Factorization { m, n, r, w: w.data, h: h.data, objective_trace: trace, iterations_run: it })
}

/// Starting point for [`nmf_cluster`].
#[derive(Debug, Clone, PartialEq)]
pub enum NmfStart {
    Random,
    /// W holds the cluster centroids, H the 0/1 membership indicator.
    FromPartition(Partition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmfClustering {
    pub partition: Partition,
    pub factorization: Factorization,
}

/// Clusters the items of `d` into `k` groups by metagene argmax.
///
/// Data with negative entries is refused unless `shift` is set, in which
/// case the global minimum is subtracted first.
#[allow(clippy::too_many_arguments)]
pub fn nmf_cluster(
    d: &DataMatrix,
    k: usize,
    variant: NmfVariant,
    stop: StopRule,
    start: &NmfStart,
    shift: bool,
    seed: u64,
) -> Result<NmfClustering> {
    let (n, m) = (d.n(), d.m());
    let mut v = d.transpose_values();
    let min = d.min_value();
    if min < 0.0 {
        if !shift {
            return Err(Error::Domain(format!("data has negative entries (minimum {min}); enable shifting")));
        }
        v.iter_mut().for_each(|x| *x -= min);
    }
    let init = match start {
        NmfStart::Random => NmfInit::Random,
        NmfStart::FromPartition(p) => {
            if p.k() != k || p.n() != n {
                return Err(Error::Parameter("initial partition does not match k or n".into()));
            }
            let sizes = p.sizes();
            let mut w = vec![0.0; m * k];
            let mut h = vec![0.0; k * n];
            for (i, &c) in p.labels().iter().enumerate() {
                h[c * n + i] = 1.0;
                for f in 0..m {
                    w[f * k + c] += v[f * n + i] / sizes[c] as f64;
                }
            }
            NmfInit::Given { w, h }
        }
    };
    let fact = nmf_factorize(&v, m, n, k, variant, stop, &init, seed)?;
    let h = &fact.h;
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            for j in 1..k {
                if h[j * n + i] > h[best * n + i] {
                    best = j;
                }
            }
            best
        })
        .collect();
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&c| sizes[c] += 1);
    for j in 0..k {
        if sizes[j] > 0 {
            continue;
        }
        let mut pick = (usize::MAX, f64::NEG_INFINITY);
        for i in 0..n {
            if sizes[labels[i]] >= 2 && h[j * n + i] > pick.1 {
                pick = (i, h[j * n + i]);
            }
        }
        let i = pick.0;
        sizes[labels[i]] -= 1;
        labels[i] = j;
        sizes[j] = 1;
    }
    Ok(NmfClustering { partition: Partition::from_raw(labels, k), factorization: fact })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_nonneg(m: usize, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seed::rng(seed);
        (0..m * n).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn objective_forms_agree() {
        let v = random_nonneg(10, 8, 1);
        let w = random_nonneg(10, 3, 2);
        let h = random_nonneg(3, 8, 3);
        let a = objective_direct(&v, &w, &h, 10, 8, 3);
        let b = objective_trace_form(&v, &w, &h, 10, 8, 3);
        assert!((a - b).abs() <= 1e-9 * a.abs());
    }

    #[test]
    fn exact_factorization_is_fixed_point() {
        let w0 = random_nonneg(6, 2, 4);
        let h0 = random_nonneg(2, 5, 5);
        let v = Mat { rows: 6, cols: 2, data: w0.clone() }.mul(&Mat { rows: 2, cols: 5, data: h0.clone() }).data;
        let stop = StopRule { max_iterations: 5, relative_tolerance: 0.0, patience: 10 };
        let init = NmfInit::Given { w: w0, h: h0 };
        let f = nmf_factorize(&v, 6, 5, 2, NmfVariant::Multiplicative, stop, &init, 0).unwrap();
        assert_eq!(f.objective_trace[0], 0.0);
        assert!(f.objective_trace.iter().all(|&x| x < 1e-20));
    }

    #[test]
    fn multiplicative_keeps_zeros() {
        let v = random_nonneg(7, 6, 9);
        let mut w = random_nonneg(7, 2, 10);
        let mut h = random_nonneg(2, 6, 11);
        w[3] = 0.0;
        h[4] = 0.0;
        let stop = StopRule { max_iterations: 30, relative_tolerance: 0.0, patience: 10 };
        let f = nmf_factorize(&v, 7, 6, 2, NmfVariant::Multiplicative, stop, &NmfInit::Given { w, h }, 0).unwrap();
        assert_eq!(f.w[3], 0.0);
        assert_eq!(f.h[4], 0.0);
    }

    #[test]
    fn lin_columns_sum_to_one() {
        let v = random_nonneg(9, 7, 12);
        let f = nmf_factorize(&v, 9, 7, 3, NmfVariant::lin(), StopRule::default(), &NmfInit::Random, 1).unwrap();
        for a in 0..3 {
            let s: f64 = (0..9).map(|i| f.w[i * 3 + a]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_and_domain_errors() {
        let mut v = random_nonneg(4, 4, 1);
        assert!(matches!(
            nmf_factorize(&v, 4, 4, 4, NmfVariant::Als, StopRule::default(), &NmfInit::Random, 0),
            Err(Error::Parameter(_))
        ));
        v[2] = -1.0;
        assert!(matches!(
            nmf_factorize(&v, 4, 4, 2, NmfVariant::Als, StopRule::default(), &NmfInit::Random, 0),
            Err(Error::Domain(_))
        ));
    }
}
