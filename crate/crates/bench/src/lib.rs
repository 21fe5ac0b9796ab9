// SPDX-License-Identifier: Apache-2.0

//! Std companion to `lpa-core`: graph files, membership files, synthetic
//! generators, a rayon-backed executor, timed detection with JSON reports,
//! and design-space sweeps written as CSV.

pub mod cli;
pub mod error;
pub mod exec;
pub mod generate;
pub mod io;
pub mod report;
pub mod run;
pub mod sweep;

pub use error::BenchError;
pub use exec::RayonExecutor;
pub use run::{detect, Detection};
