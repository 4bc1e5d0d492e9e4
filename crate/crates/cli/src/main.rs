use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kstar::error::{CliError, CliResult};
use kstar::io::{load_labels, load_matrix, write_labels, write_matrix};
use kstar::report::*;
use kstar::run::run_measure;
use kstar::spec::{parse_clusterer, MeasureKind, MeasureOptions};
use kstar::suite::{generate, parse_suite, run_suite, write_report};
use kstar_core::clusterer::{Clusterer, Start};
use kstar_core::indices::{ContingencyTable, ExternalIndex};
use kstar_core::nmf::{nmf_cluster, NmfStart};
use kstar_core::DataMatrix;
use serde_json::json;

#[derive(Parser)]
#[command(name = "kstar", version, about = "Estimate the number of clusters in a dataset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Comma- or tab-separated numeric matrix, one item per row.
    #[arg(long)]
    data: PathBuf,
    /// The first line holds column names.
    #[arg(long)]
    header: bool,
    /// 1-based column holding row names.
    #[arg(long)]
    label_column: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> CliResult<DataMatrix> {
        let col = match self.label_column {
            Some(0) => return Err(CliError::usage("--label-column is 1-based")),
            c => c.map(|c| c - 1),
        };
        load_matrix(&self.data, self.header, col)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset and its class labels.
    Generate {
        /// gaussian3, gaussian5 or simulated6.
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Square side for gaussian5.
        #[arg(long, default_value_t = 3.0)]
        lambda: f64,
        /// Matrix output [default: NAME.csv].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Labels output, one class index per line [default: NAME.labels].
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Cluster a dataset into k groups.
    Cluster {
        #[command(flatten)]
        data: DataArgs,
        /// hier-{a,c,s}, kmeans-{r,a,c,s}, nmf-{mult,lin,als}-{r,a,c,s}[+shift].
        #[arg(long, default_value = "hier-a")]
        clusterer: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Partition CSV (row, cluster).
        #[arg(long)]
        out: PathBuf,
        /// Merge list of a hierarchical clusterer.
        #[arg(long)]
        dendrogram: Option<PathBuf>,
        /// Directory for the NMF factors and objective trace.
        #[arg(long)]
        nmf_dir: Option<PathBuf>,
    },
    /// Compare two label files with the external indices.
    Indices {
        first: PathBuf,
        second: PathBuf,
        /// Recall weight of the F-index.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
    /// Run one measure end to end and print the prediction as JSON.
    Validate {
        #[command(flatten)]
        data: DataArgs,
        /// Gold labels, one class index per line.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value = "hier-a")]
        clusterer: String,
        /// wcss, kl, gap, g-gap, wcss-r, fom, diff-fom, g-fom, fom-r, consensus, fc, me, clest, ld, roth.
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 30)]
        k_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra measure option as key=value (h, beta, gap_steps, gap_l, null, ...).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Score the partition at the predicted k against the gold labels.
        #[arg(long)]
        external: Option<String>,
        /// Directory for curves.csv, prediction.json and measure extras.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a suite config and write the report CSV.
    Bench {
        config: PathBuf,
        /// Report path [default: stdout].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn cmd_generate(name: &str, seed: u64, lambda: f64, out: Option<PathBuf>, labels: Option<PathBuf>) -> CliResult<()> {
    let (d, gold) = generate(name, seed, lambda)?;
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let labels = labels.unwrap_or_else(|| PathBuf::from(format!("{name}.labels")));
    write_matrix(&out, &d)?;
    write_labels(&labels, gold.labels())?;
    Ok(())
}

fn cmd_cluster(
    data: &DataArgs,
    clusterer: &str,
    k: usize,
    seed: u64,
    out: &Path,
    dendrogram: Option<&Path>,
    nmf_dir: Option<&Path>,
) -> CliResult<()> {
    let d = data.load()?;
    let c = parse_clusterer(clusterer)?;
    let partition = match &c {
        Clusterer::Nmf { variant, stop, start, shift } => {
            let init = match start {
                Start::Random => NmfStart::Random,
                Start::Hier(l) => NmfStart::FromPartition(Clusterer::Hier(*l).cluster(&d, k, seed)?),
            };
            let r = nmf_cluster(&d, k, *variant, *stop, &init, *shift, seed)?;
            if let Some(dir) = nmf_dir {
                write_nmf(dir, &r.factorization)?;
            }
            r.partition
        }
        _ => {
            if nmf_dir.is_some() {
                return Err(CliError::usage("--nmf-dir needs an nmf-* clusterer"));
            }
            c.cluster(&d, k, seed)?
        }
    };
    if let Some(path) = dendrogram {
        let tree = c.dendrogram(&d).ok_or_else(|| CliError::usage("--dendrogram needs a hier-* clusterer"))?;
        write_dendrogram(path, &tree)?;
    }
    write_partition(out, &d, &partition)
}

fn cmd_indices(first: &Path, second: &Path, b: f64) -> CliResult<()> {
    let (a, c) = (load_labels(first)?, load_labels(second)?);
    let t = ContingencyTable::from_labels(a.labels(), c.labels())?;
    let value = |i: ExternalIndex| match i.compute(&t) {
        Ok(v) => json!(v),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let f = kstar_core::indices::f_index(&t, b).map(|v| json!(v)).unwrap_or_else(|e| json!({ "error": e.to_string() }));
    let report = json!({
        "n": t.n(),
        "rand": value(ExternalIndex::Rand),
        "adjusted_rand": value(ExternalIndex::AdjustedRand),
        "fm": value(ExternalIndex::FowlkesMallows),
        "f": f,
        "f_b": b,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_validate(
    data: &DataArgs,
    labels: Option<&Path>,
    clusterer: &str,
    measure: &str,
    k_min: usize,
    k_max: usize,
    seed: u64,
    sets: &[String],
    external: Option<&str>,
    out_dir: Option<&Path>,
) -> CliResult<()> {
    let kind: MeasureKind = measure.parse()?;
    let c = parse_clusterer(clusterer)?;
    let mut o = MeasureOptions { k_min, k_max, ..MeasureOptions::default() };
    for s in sets {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got {s:?}")))?;
        o.set(k.trim(), v.trim())?;
    }
    let external = external
        .map(|name| {
            ExternalIndex::parse(name).ok_or_else(|| CliError::usage(format!("unknown index {name:?}; valid: rand, adjusted-rand, fm, f")))
        })
        .transpose()?;
    if external.is_some() && labels.is_none() {
        return Err(CliError::usage("--external needs --labels"));
    }
    let d = data.load()?;
    let gold = labels.map(load_labels).transpose()?;
    if let Some(g) = &gold {
        if g.labels().len() != d.n() {
            return Err(CliError::Data(format!("{} labels for {} rows", g.labels().len(), d.n())));
        }
    }
    let out = run_measure(&d, kind, &c, &o, seed)?;
    let mut report = json!({
        "measure": kind.name(),
        "clusterer": c.name(),
        "seed": seed,
        "params": o.record(),
        "prediction": prediction_json(&out.prediction),
    });
    if let Some(g) = &gold {
        report["gold_k"] = json!(g.class_count());
    }
    if let (Some(index), Some(g)) = (external, &gold) {
        let p = c.cluster(&d, out.prediction.k_star, seed)?;
        report["external"] = json!({ "index": index.name(), "k": out.prediction.k_star, "value": index.between(p.labels(), g.labels())? });
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_curves(&dir.join("curves.csv"), &out.curves)?;
        if let Some(r) = &out.consensus {
            write_consensus(&dir.join("consensus.csv"), r)?;
        }
        if let Some(r) = &out.me {
            write_me_histograms(&dir.join("me_histograms.csv"), r)?;
        }
        fs::write(dir.join("prediction.json"), serde_json::to_string_pretty(&report)?)?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_bench(config: &Path, out: Option<&Path>) -> CliResult<()> {
    let text = fs::read_to_string(config).map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
    let suite = parse_suite(&text)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let rows = run_suite(&suite, base);
    match out {
        Some(p) => write_report(fs::File::create(p)?, &rows),
        None => write_report(std::io::stdout().lock(), &rows),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate { name, seed, lambda, out, labels } => cmd_generate(name, *seed, *lambda, out.clone(), labels.clone()),
        Command::Cluster { data, clusterer, k, seed, out, dendrogram, nmf_dir } => {
            cmd_cluster(data, clusterer, *k, *seed, out, dendrogram.as_deref(), nmf_dir.as_deref())
        }
        Command::Indices { first, second, b } => cmd_indices(first, second, *b),
        Command::Validate { data, labels, clusterer, measure, k_min, k_max, seed, sets, external, out_dir } => cmd_validate(
            data,
            labels.as_deref(),
            clusterer,
            measure,
            *k_min,
            *k_max,
            *seed,
            sets,
            external.as_deref(),
            out_dir.as_deref(),
        ),
        Command::Bench { config, out } => cmd_bench(config, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kstar: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
