//! Configuration, study drivers and file output around `transport-core`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod io;
pub mod outcome;
pub mod studies;

pub use config::{ConfigError, Override, StudyConfig};
pub use error::LabError;
pub use outcome::{Check, Comparison, Provenance, StudyOutcome};
pub use studies::{run_study, write_outputs, StudyKind, StudyRun};
