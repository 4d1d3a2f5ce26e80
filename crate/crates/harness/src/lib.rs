//! Scenario runner for the `neckflow` toolkit: configuration, the scenario
//! registry and CSV/manifest output.

// `!(x > 0.0)` is the intended guard: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod scenarios;

pub use config::{load_config, ConfigError, RawConfig, RunConfig, Scenario};
pub use output::{CheckResult, RunManifest, Table};
pub use scenarios::{run_outcome, run_scenario, Outcome};
