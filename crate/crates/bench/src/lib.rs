//! Experiment harness: config parsing, problem and sampler construction,
//! and the `sample`, `optimize`, `predict` and `verify` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod setup;

pub use error::{BenchError, Result};
