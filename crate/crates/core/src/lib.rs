//! Estimating the number of clusters in a dataset.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats and the command-line harness live in the `kstar`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod clusterer;
pub mod clustering;
pub mod data;
pub mod datagen;
pub mod error;
pub mod indices;
pub mod matching;
pub mod measures;
pub mod nmf;
pub mod seed;
pub mod stability;
pub mod synth;

pub use data::{standardize_rows, stirling_partition_count, DataMatrix, GoldStandard, Partition, Standardized};
pub use error::{Error, Result};
