//! Monte Carlo verification: estimators and tests, configuration, batched
//! execution and reports.

pub mod config;
pub mod experiments;
pub mod report;
pub mod runner;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{asymptotic_rows, er_rows, exact_rows, run, ErRow};
pub use report::{ExperimentReport, OutputFormat, ReportRow};
