//! Reading delimited matrices and label files, writing generated datasets.

use std::fs;
use std::io::Write;
use std::path::Path;

use kstar_core::{DataMatrix, GoldStandard, Partition};

use crate::error::{CliError, CliResult};

fn delimiter(text: &str) -> u8 {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.contains('\t') { b'\t' } else { b',' }
}

/// Parses comma- or tab-separated numeric rows (delimiter taken from the
/// first non-empty line). With `label_column`, that column becomes the row
/// ids; otherwise ids are the row ordinals. Header cells become feature ids.
///
/// Error coordinates are 1-based file lines and columns.
pub fn parse_matrix(text: &str, has_header: bool, label_column: Option<usize>) -> CliResult<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter(text))
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut width: Option<usize> = None;
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if has_header && header.is_none() {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        if let Some(c) = label_column {
            if c >= record.len() {
                return Err(CliError::Data(format!("row {line}: no label column {}", c + 1)));
            }
        }
        let cells = record.len() - usize::from(label_column.is_some());
        match width {
            None => width = Some(cells),
            Some(w) if w != cells => {
                return Err(CliError::Data(format!("row {line}: {cells} numeric columns, expected {w}")));
            }
            _ => {}
        }
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_column {
                ids.push(cell.to_string());
                continue;
            }
            let x: f64 = cell
                .parse()
                .map_err(|_| CliError::Data(format!("row {line}, column {}: cannot parse {cell:?} as a number", col + 1)))?;
            if !x.is_finite() {
                return Err(CliError::Data(format!("row {line}, column {}: value {cell:?} is not finite", col + 1)));
            }
            values.push(x);
        }
        n += 1;
    }
    let m = width.unwrap_or(0);
    if n < 2 {
        return Err(CliError::Data(format!("need at least 2 data rows, found {n}")));
    }
    let mut d = DataMatrix::new(values, n, m)?;
    if label_column.is_some() {
        d = d.with_row_ids(ids)?;
    }
    if let Some(h) = header {
        let names: Vec<String> = h.into_iter().enumerate().filter(|(i, _)| Some(*i) != label_column).map(|(_, s)| s).collect();
        if names.len() == m {
            d = d.with_feature_ids(names)?;
        }
    }
    Ok(d)
}

pub fn load_matrix(path: &Path, has_header: bool, label_column: Option<usize>) -> CliResult<DataMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text, has_header, label_column).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// One class index per non-empty line. Any non-negative integers are
/// accepted; classes are renumbered 0.. in order of first appearance.
pub fn parse_labels(text: &str) -> CliResult<GoldStandard> {
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        labels.push(line.parse::<usize>().map_err(|_| CliError::Data(format!("labels line {}: {line:?} is not a class index", i + 1)))?);
    }
    if labels.is_empty() {
        return Err(CliError::Data("labels file is empty".into()));
    }
    Ok(GoldStandard::new(Partition::from_labels(&labels).labels().to_vec())?)
}

pub fn load_labels(path: &Path) -> CliResult<GoldStandard> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_labels(&text)
}

/// Shortest decimal form that reads back to the same f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else if x.is_infinite() {
        if x > 0.0 { "Inf".into() } else { "-Inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn write_matrix(path: &Path, d: &DataMatrix) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for i in 0..d.n() {
        w.write_record(d.row(i).iter().map(|&x| fmt_f64(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> CliResult<()> {
    let mut f = fs::File::create(path)?;
    for l in labels {
        writeln!(f, "{l}")?;
    }
    Ok(())
}
