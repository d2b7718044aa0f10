//! Experiment harness: JSON configs, a seeded Monte Carlo engine, suites,
//! CSV reports and the acceptance checks.

pub mod check;
pub mod config;
pub mod engine;
pub mod error;
pub mod report;
pub mod suite;

pub use config::{ExperimentConfig, StrategyKind, SuiteConfig};
pub use engine::{run_experiment, RevenueReport};
pub use error::HarnessError;
pub use report::{write_csv, CsvOptions, Row};
pub use suite::{run_suite, SuiteOutcome};
