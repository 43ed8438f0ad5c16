//! Experiment harness: Burgers full-order model, balanced-truncation
//! reduced models, ILQR controllers, and the files that record them.

// `!(x > 0.0)` style comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod props;
pub mod reports;

pub use config::{ExperimentConfig, MethodSelection};
pub use error::{CliError, CliResult};
pub use pipeline::{Experiment, RunRecord};
