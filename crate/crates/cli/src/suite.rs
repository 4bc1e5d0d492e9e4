//! Benchmark suites: a small sectioned key-value config and the report it
//! produces.
//!
//! ```text
//! # comment
//! [suite]
//! seed = 7
//! clusterers = hier-a, kmeans-r
//! k_max = 12            # any measure option here is a default for all measures
//!
//! [dataset g3]
//! generator = gaussian3 # gaussian3 | gaussian5 | simulated6
//! seed = 1
//!
//! [dataset mine]
//! path = data.csv
//! labels = data.labels
//! header = true
//! label_column = 1      # 1-based
//!
//! [measure consensus]   # kind defaults to the section name
//! h = 250
//!
//! [measure quick-fc]
//! kind = fc
//! h = 50
//! ```

use std::path::{Path, PathBuf};
use std::time::Instant;

use kstar_core::clusterer::Clusterer;
use kstar_core::synth::{gen_gaussian3, gen_gaussian5, gen_simulated6};
use kstar_core::{DataMatrix, GoldStandard};

use crate::error::{CliError, CliResult};
use crate::io::{load_labels, load_matrix};
use crate::run::run_measure;
use crate::spec::{parse_clusterer, MeasureKind, MeasureOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Generator { name: String, seed: u64, lambda: f64 },
    File { path: PathBuf, labels: Option<PathBuf>, header: bool, label_column: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub name: String,
    pub source: DataSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEntry {
    pub name: String,
    pub kind: MeasureKind,
    pub options: MeasureOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub seed: u64,
    pub clusterers: Vec<(String, Clusterer)>,
    pub datasets: Vec<DatasetEntry>,
    pub measures: Vec<MeasureEntry>,
}

/// Generates one of the named synthetic datasets.
pub fn generate(name: &str, seed: u64, lambda: f64) -> CliResult<(DataMatrix, GoldStandard)> {
    match name {
        "gaussian3" => Ok(gen_gaussian3(seed)),
        "gaussian5" => Ok(gen_gaussian5(lambda, seed)?),
        "simulated6" => Ok(gen_simulated6(seed)),
        _ => Err(CliError::usage(format!("unknown dataset {name:?}; valid: gaussian3, gaussian5, simulated6"))),
    }
}

impl DataSource {
    /// Resolves relative paths against `base`.
    pub fn load(&self, base: &Path) -> CliResult<(DataMatrix, Option<GoldStandard>)> {
        match self {
            DataSource::Generator { name, seed, lambda } => generate(name, *seed, *lambda).map(|(d, g)| (d, Some(g))),
            DataSource::File { path, labels, header, label_column } => {
                let d = load_matrix(&base.join(path), *header, *label_column)?;
                let gold = labels.as_ref().map(|l| load_labels(&base.join(l))).transpose()?;
                if let Some(g) = &gold {
                    if g.labels().len() != d.n() {
                        return Err(CliError::Data(format!("{} labels for {} rows", g.labels().len(), d.n())));
                    }
                }
                Ok((d, gold))
            }
        }
    }

    pub fn record(&self) -> String {
        match self {
            DataSource::Generator { name, seed, lambda } if name == "gaussian5" => format!("{name}(seed={seed},lambda={lambda})"),
            DataSource::Generator { name, seed, .. } => format!("{name}(seed={seed})"),
            DataSource::File { path, header, label_column, .. } => {
                let lc = label_column.map_or("none".to_string(), |c| (c + 1).to_string());
                format!("file({},header={header},label_column={lc})", path.display())
            }
        }
    }
}

enum Section {
    None,
    Suite,
    Dataset(usize),
    Measure(usize),
}

struct DatasetDraft {
    name: String,
    line: usize,
    generator: Option<String>,
    seed: u64,
    lambda: f64,
    path: Option<PathBuf>,
    labels: Option<PathBuf>,
    header: bool,
    label_column: Option<usize>,
}

/// (line, key, value)
type Assignment = (usize, String, String);

/// (name, explicit kind with its line, option assignments, header line)
type MeasureDraft = (String, Option<(usize, String)>, Vec<Assignment>, usize);

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

pub fn parse_suite(text: &str) -> CliResult<Suite> {
    let mut seed = 0u64;
    let mut clusterers = Vec::new();
    let mut defaults: Vec<Assignment> = Vec::new();
    let mut datasets: Vec<DatasetDraft> = Vec::new();
    let mut measures: Vec<MeasureDraft> = Vec::new();
    let mut section = Section::None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| CliError::Usage(format!("suite line {line_no}: {msg}"));
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| err("unterminated section header".into()))?.trim();
            let mut words = inner.split_whitespace();
            section = match (words.next(), words.next(), words.next()) {
                (Some("suite"), None, _) => Section::Suite,
                (Some("dataset"), Some(name), None) => {
                    if datasets.iter().any(|d| d.name == name) {
                        return Err(err(format!("dataset {name:?} defined twice")));
                    }
                    datasets.push(DatasetDraft {
                        name: name.into(),
                        line: line_no,
                        generator: None,
                        seed: 0,
                        lambda: 3.0,
                        path: None,
                        labels: None,
                        header: false,
                        label_column: None,
                    });
                    Section::Dataset(datasets.len() - 1)
                }
                (Some("measure"), Some(name), None) => {
                    if measures.iter().any(|m| m.0 == name) {
                        return Err(err(format!("measure {name:?} defined twice")));
                    }
                    measures.push((name.into(), None, Vec::new(), line_no));
                    Section::Measure(measures.len() - 1)
                }
                _ => return Err(err(format!("unknown section [{inner}]; expected [suite], [dataset NAME] or [measure NAME]"))),
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match &section {
            Section::None => return Err(err("assignment before any section".into())),
            Section::Suite => match key {
                "seed" => seed = value.parse().map_err(|_| err(format!("seed: cannot parse {value:?}")))?,
                "clusterers" => {
                    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let c = parse_clusterer(name).map_err(|e| err(e.to_string()))?;
                        clusterers.push((name.to_string(), c));
                    }
                }
                _ => {
                    // validated eagerly so the error names this line
                    MeasureOptions::default().set(key, value).map_err(|e| err(e.to_string()))?;
                    defaults.push((line_no, key.into(), value.into()));
                }
            },
            Section::Dataset(i) => {
                let d = &mut datasets[*i];
                match key {
                    "generator" => d.generator = Some(value.into()),
                    "seed" => d.seed = value.parse().map_err(|_| err(format!("seed: cannot parse {value:?}")))?,
                    "lambda" => d.lambda = value.parse().map_err(|_| err(format!("lambda: cannot parse {value:?}")))?,
                    "path" => d.path = Some(value.into()),
                    "labels" => d.labels = Some(value.into()),
                    "header" => d.header = parse_bool(value).ok_or_else(|| err(format!("header: expected true or false, got {value:?}")))?,
                    "label_column" => {
                        let c: usize = value.parse().map_err(|_| err(format!("label_column: cannot parse {value:?}")))?;
                        if c == 0 {
                            return Err(err("label_column is 1-based".into()));
                        }
                        d.label_column = Some(c - 1);
                    }
                    _ => return Err(err(format!("unknown dataset key {key:?}"))),
                }
            }
            Section::Measure(i) => {
                let m = &mut measures[*i];
                if key == "kind" {
                    m.1 = Some((line_no, value.into()));
                } else {
                    MeasureOptions::default().set(key, value).map_err(|e| err(e.to_string()))?;
                    m.2.push((line_no, key.into(), value.into()));
                }
            }
        }
    }

    let datasets = datasets
        .into_iter()
        .map(|d| {
            let source = match (d.generator, d.path) {
                (Some(name), None) => DataSource::Generator { name, seed: d.seed, lambda: d.lambda },
                (None, Some(path)) => DataSource::File { path, labels: d.labels, header: d.header, label_column: d.label_column },
                _ => {
                    return Err(CliError::Usage(format!(
                        "suite line {}: dataset {:?} needs exactly one of generator or path",
                        d.line, d.name
                    )))
                }
            };
            Ok(DatasetEntry { name: d.name, source })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let measures = measures
        .into_iter()
        .map(|(name, kind, assignments, line)| {
            let (kline, kname) = kind.unwrap_or((line, name.clone()));
            let kind: MeasureKind = kname.parse().map_err(|e: CliError| CliError::Usage(format!("suite line {kline}: {e}")))?;
            let mut options = MeasureOptions::default();
            for (l, k, v) in defaults.iter().chain(&assignments) {
                options.set(k, v).map_err(|e| CliError::Usage(format!("suite line {l}: {e}")))?;
            }
            Ok(MeasureEntry { name, kind, options })
        })
        .collect::<CliResult<Vec<_>>>()?;

    Ok(Suite { seed, clusterers, datasets, measures })
}

/// One cell of the dataset × measure × clusterer product.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub measure: String,
    pub clusterer: String,
    pub k_star: Option<usize>,
    pub gold_k: Option<usize>,
    /// Measure computation only; file reading is excluded.
    pub millis: f64,
    pub seed: u64,
    pub params: String,
    /// `ok` or the error class.
    pub status: String,
    pub message: String,
}

pub const REPORT_HEADER: [&str; 10] =
    ["dataset", "measure", "clusterer", "k_star", "gold_k", "millis", "seed", "params", "status", "message"];

fn params_record(kind: MeasureKind, o: &MeasureOptions, source: &DataSource) -> String {
    let mut parts = vec![format!("kind={kind}")];
    parts.extend(o.record().into_iter().map(|(k, v)| format!("{k}={v}")));
    parts.push(format!("data={}", source.record()));
    parts.join(";")
}

/// Runs every cell. Failures become rows; the run always completes.
/// `base` is the directory relative file paths are resolved against.
pub fn run_suite(suite: &Suite, base: &Path) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for ds in &suite.datasets {
        let loaded = ds.source.load(base);
        for m in &suite.measures {
            for (cname, c) in &suite.clusterers {
                let mut row = BenchRow {
                    dataset: ds.name.clone(),
                    measure: m.name.clone(),
                    clusterer: cname.clone(),
                    k_star: None,
                    gold_k: None,
                    millis: 0.0,
                    seed: suite.seed,
                    params: params_record(m.kind, &m.options, &ds.source),
                    status: "ok".into(),
                    message: String::new(),
                };
                let result = loaded.as_ref().map_err(Clone::clone).and_then(|(d, gold)| {
                    row.gold_k = gold.as_ref().map(|g| g.class_count());
                    let start = Instant::now();
                    let out = run_measure(d, m.kind, c, &m.options, suite.seed);
                    row.millis = start.elapsed().as_secs_f64() * 1e3;
                    out
                });
                match result {
                    Ok(out) => row.k_star = Some(out.prediction.k_star),
                    Err(e) => {
                        log::warn!("{} / {} / {}: {e}", ds.name, m.name, cname);
                        row.status = e.code_name().into();
                        row.message = e.to_string();
                    }
                }
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| (&a.dataset, &a.measure, &a.clusterer).cmp(&(&b.dataset, &b.measure, &b.clusterer)));
    rows
}

pub fn write_report<W: std::io::Write>(out: W, rows: &[BenchRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            r.dataset.clone(),
            r.measure.clone(),
            r.clusterer.clone(),
            opt(r.k_star),
            opt(r.gold_k),
            format!("{:.3}", r.millis),
            r.seed.to_string(),
            r.params.clone(),
            r.status.clone(),
            r.message.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_defaults() {
        let s = parse_suite(
            "[suite]\nseed = 3\nclusterers = hier-a, kmeans-r\nk_max = 6\n\n[dataset g]\ngenerator = gaussian5\nlambda = 2\n\
             [measure consensus]\nh = 10\n[measure quick]\nkind = fc\nk_max = 4 # inline comment\n",
        )
        .unwrap();
        assert_eq!(s.seed, 3);
        assert_eq!(s.clusterers.len(), 2);
        assert_eq!(s.datasets[0].source, DataSource::Generator { name: "gaussian5".into(), seed: 0, lambda: 2.0 });
        assert_eq!(s.measures[0].kind, MeasureKind::Consensus);
        assert_eq!((s.measures[0].options.h, s.measures[0].options.k_max), (10, 6));
        assert_eq!((s.measures[1].kind, s.measures[1].options.k_max), (MeasureKind::Fc, 4));
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("[suite]\nseed = x\n", 2),
            ("[suite]\n\n[bogus]\n", 3),
            ("k = 1\n", 1),
            ("[measure nope]\n", 1),
            ("[measure me]\nh = -1\n", 2),
            ("[dataset d]\nseed = 1\n", 1),
            ("[suite]\nclusterers = hier-q\n", 2),
            ("[dataset d]\nheader = maybe\n", 2),
        ] {
            let e = parse_suite(text).unwrap_err();
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains(&format!("line {line}:")), "{text:?}: {e}");
        }
    }

    #[test]
    fn empty_suite_has_no_rows() {
        let s = parse_suite("").unwrap();
        let rows = run_suite(&s, Path::new("."));
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_report(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), REPORT_HEADER.join(","));
    }
}
