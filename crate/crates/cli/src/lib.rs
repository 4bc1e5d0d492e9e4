//! Command-line harness over `kstar-core`: file formats, clusterer and measure names,
//! measure dispatch and benchmark suites.

pub mod error;
pub mod io;
pub mod report;
pub mod run;
pub mod spec;
pub mod suite;

pub use error::{CliError, CliResult};
