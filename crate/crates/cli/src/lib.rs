//! Scenario runner for the `crooks` command-line tool.

pub mod error;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::{CliError, Result};
pub use report::{ReportRow, Status};
pub use runner::{run_all, run_scenario, RunOptions};
pub use scenario::{expand_sweep, Check, Scenario};
