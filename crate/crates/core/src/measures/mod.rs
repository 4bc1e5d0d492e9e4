//! Internal validation measures and the prediction rules built on them.

mod curve;
mod fom;
mod gap;
mod geometric;
mod kl;
mod knee;
mod wcss;

pub use curve::{CurveSeries, Prediction, NO_STRUCTURE};
pub use fom::{fom_curve, fom_r_curve, fom_value};
pub use gap::{gap_predict, GapResult, GapStep};
pub(crate) use gap::assemble_gap;
pub use geometric::{diff_fom_predict, g_fom_predict, g_gap_predict, segment_lengths};
pub use kl::{diff_curve, kl_predict};
pub use knee::knee_detect;
pub use wcss::{wcss, wcss_curve, wcss_r_curve, wcss_r_path};
