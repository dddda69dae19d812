//! Batch front end for `randers-core`.
//!
//! A JSON scenario names a domain, one metric (`randers`, `stationary` or
//! `zermelo`) and a list of tasks. `run` executes the tasks in order and
//! writes CSV/JSON artifacts plus a `manifest.json` listing every file with
//! its SHA-256; `validate` stops after the schema, expression and
//! metric-validity checks.

pub mod config;
pub mod output;
pub mod runner;
pub mod tasks;

pub use config::{RunConfig, SchemaError};
pub use runner::{run, validate, CliError, RunFlags, RunOutcome};
