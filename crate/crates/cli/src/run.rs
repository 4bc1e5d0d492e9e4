//! Runs one measure with one clusterer on one dataset.

use kstar_core::clusterer::Clusterer;
use kstar_core::datagen::DgpSpec;
use kstar_core::measures::*;
use kstar_core::stability::*;
use kstar_core::DataMatrix;

use crate::error::CliResult;
use crate::spec::{check_compatible, MeasureKind, MeasureOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOutput {
    pub prediction: Prediction,
    /// Named curves for plotting.
    pub curves: Vec<(String, CurveSeries)>,
    pub consensus: Option<ConsensusResult>,
    pub me: Option<MeResult>,
}

impl MeasureOutput {
    fn plain(prediction: Prediction, curves: Vec<(String, CurveSeries)>) -> Self {
        MeasureOutput { prediction, curves, consensus: None, me: None }
    }
}

fn stability_config(clusterer: &Clusterer, o: &MeasureOptions, seed: u64) -> StabilityConfig {
    let mut c = StabilityConfig::new(clusterer.clone(), o.k_min, o.k_max, seed);
    c.h = o.h;
    c.beta = o.beta;
    c.dgp = DgpSpec::Subsample(o.beta);
    c.external_index = o.index;
    c
}

fn kmeans_niter(c: &Clusterer) -> usize {
    match c {
        Clusterer::KMeans { niter, .. } => *niter,
        _ => kstar_core::clusterer::KMEANS_NITER,
    }
}

pub fn run_measure(
    d: &DataMatrix,
    kind: MeasureKind,
    clusterer: &Clusterer,
    o: &MeasureOptions,
    seed: u64,
) -> CliResult<MeasureOutput> {
    check_compatible(kind, clusterer)?;
    let named = |name: &str, c: &CurveSeries| vec![(name.to_string(), c.clone())];
    let out = match kind {
        MeasureKind::WcssKnee | MeasureKind::Kl | MeasureKind::GGap => {
            let curve = wcss_curve(d, clusterer, o.k_max, seed)?;
            let p = match kind {
                MeasureKind::WcssKnee => knee_detect(&curve, true)?,
                MeasureKind::Kl => kl_predict(&curve, d.m())?,
                _ => g_gap_predict(&curve, o.offset)?,
            };
            MeasureOutput::plain(p, named("wcss", &curve))
        }
        MeasureKind::WcssR => {
            let curve = wcss_r_curve(d, o.refresh, o.k_max, kmeans_niter(clusterer), seed)?;
            MeasureOutput::plain(knee_detect(&curve, true)?, named("wcss-r", &curve))
        }
        MeasureKind::FomKnee | MeasureKind::DiffFom | MeasureKind::GFom => {
            let curve = fom_curve(d, clusterer, o.k_max, seed)?;
            let p = match kind {
                MeasureKind::FomKnee => knee_detect(&curve, true)?,
                MeasureKind::DiffFom => diff_fom_predict(&curve, d.m())?,
                _ => g_fom_predict(&curve, o.offset)?,
            };
            MeasureOutput::plain(p, named("fom", &curve))
        }
        MeasureKind::FomR => {
            let curve = fom_r_curve(d, o.refresh, o.k_max, kmeans_niter(clusterer), seed)?;
            MeasureOutput::plain(knee_detect(&curve, true)?, named("fom-r", &curve))
        }
        MeasureKind::Gap => {
            let g = gap_predict(d, clusterer, o.null, o.gap_l, o.gap_steps, o.k_max, seed)?;
            let curves = g.steps.iter().enumerate().map(|(s, st)| (format!("gap-step{}", s + 1), st.gap.clone())).collect();
            MeasureOutput::plain(g.prediction, curves)
        }
        MeasureKind::Consensus | MeasureKind::Fc => {
            let cfg = stability_config(clusterer, o, seed);
            let r = if kind == MeasureKind::Consensus { consensus_run(d, &cfg)? } else { fc_run(d, &cfg)? };
            let curves = vec![
                ("area".to_string(), r.area.clone()),
                ("delta".to_string(), r.delta.clone()),
                ("delta-prime".to_string(), r.delta_prime.clone()),
            ];
            MeasureOutput { prediction: r.prediction.clone(), curves, consensus: Some(r), me: None }
        }
        MeasureKind::Me => {
            let r = me_run(d, &stability_config(clusterer, o, seed))?;
            let curves = named("fraction-above-0.9", &r.prediction.evidence);
            MeasureOutput { prediction: r.prediction.clone(), curves, consensus: None, me: Some(r) }
        }
        MeasureKind::Clest => {
            let mut cfg = stability_config(clusterer, o, seed);
            cfg.h = o.clest_h;
            cfg.alpha = CLEST_TRAIN_FRACTION;
            let params = ClestParams { b0: o.clest_b0, p_max: o.clest_p_max, d_min: o.clest_d_min, null_model: o.null };
            let r = clest_run(d, &cfg, &params)?;
            let curves = vec![
                ("t".to_string(), r.t.clone()),
                ("t0".to_string(), r.t0.clone()),
                ("p".to_string(), r.p.clone()),
                ("d".to_string(), r.d.clone()),
            ];
            MeasureOutput::plain(r.prediction, curves)
        }
        MeasureKind::LevineDomany => {
            let p = levine_domany_run(d, &stability_config(clusterer, o, seed))?;
            let c = named("agreement", &p.evidence);
            MeasureOutput::plain(p, c)
        }
        MeasureKind::Roth => {
            let mut cfg = stability_config(clusterer, o, seed);
            cfg.alpha = ROTH_TRAIN_FRACTION;
            let p = roth_run(d, &cfg)?;
            let c = named("instability", &p.evidence);
            MeasureOutput::plain(p, c)
        }
    };
    Ok(out)
}
