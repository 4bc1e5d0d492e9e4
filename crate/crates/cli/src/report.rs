//! CSV and JSON writers for partitions, trees, curves and predictions.

use std::fs;
use std::path::Path;

use kstar_core::clustering::Dendrogram;
use kstar_core::measures::{CurveSeries, Prediction};
use kstar_core::nmf::Factorization;
use kstar_core::stability::{ConsensusResult, MeResult};
use kstar_core::{DataMatrix, Partition};
use serde_json::{json, Value};

use crate::error::CliResult;
use crate::io::fmt_f64;

pub fn write_partition(path: &Path, d: &DataMatrix, p: &Partition) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["row", "cluster"])?;
    for (i, l) in p.labels().iter().enumerate() {
        w.write_record([d.row_id(i).as_ref(), &l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One line per merge; node ids follow the leaves-then-merges numbering.
pub fn write_dendrogram(path: &Path, tree: &Dendrogram) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "left", "right", "height", "node"])?;
    for (s, m) in tree.merges().iter().enumerate() {
        w.write_record([s.to_string(), m.left.to_string(), m.right.to_string(), fmt_f64(m.height), (tree.leaves() + s).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: curve, k, value, dispersion (empty when absent).
pub fn write_curves(path: &Path, curves: &[(String, CurveSeries)]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["curve", "k", "value", "dispersion"])?;
    for (name, c) in curves {
        for (i, (&k, &v)) in c.k_values().iter().zip(c.values()).enumerate() {
            let s = c.dispersion().map(|s| fmt_f64(s[i])).unwrap_or_default();
            w.write_record([name.clone(), k.to_string(), fmt_f64(v), s])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() { json!(x) } else { json!(fmt_f64(x)) }
}

pub fn prediction_json(p: &Prediction) -> Value {
    json!({
        "k_star": p.k_star,
        "rule": p.rule,
        "low_confidence": p.low_confidence,
        "warnings": p.warnings,
        "evidence": {
            "k": p.evidence.k_values(),
            "value": p.evidence.values().iter().map(|&v| json_f64(v)).collect::<Vec<_>>(),
        },
    })
}

/// k, A(k), Δ(k), Δ′(k).
pub fn write_consensus(path: &Path, r: &ConsensusResult) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "area", "delta", "delta_prime"])?;
    for &k in &r.k_values {
        let get = |c: &CurveSeries| c.value_at(k).map(fmt_f64).unwrap_or_default();
        w.write_record([k.to_string(), get(&r.area), get(&r.delta), get(&r.delta_prime)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_me_histograms(path: &Path, r: &MeResult) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "bin_low", "bin_high", "count"])?;
    for (&k, h) in r.k_values.iter().zip(&r.histograms) {
        let width = (1.0 - r.low) / h.len() as f64;
        for (b, c) in h.iter().enumerate() {
            let lo = r.low + b as f64 * width;
            w.write_record([k.to_string(), fmt_f64(lo), fmt_f64(lo + width), c.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_grid(path: &Path, values: &[f64], cols: usize) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in values.chunks(cols) {
        w.write_record(row.iter().map(|&x| fmt_f64(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// `W.csv` (m×r), `H.csv` (r×n) and `trace.csv` in `dir`.
pub fn write_nmf(dir: &Path, f: &Factorization) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    write_grid(&dir.join("W.csv"), &f.w, f.r)?;
    write_grid(&dir.join("H.csv"), &f.h, f.n)?;
    let mut w = csv::Writer::from_path(dir.join("trace.csv"))?;
    w.write_record(["iteration", "objective"])?;
    for (i, v) in f.objective_trace.iter().enumerate() {
        w.write_record([i.to_string(), fmt_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}
