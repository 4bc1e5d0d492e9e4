//! Reference implementations and fixed-seed check suites shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod oracles;
pub mod suites;
