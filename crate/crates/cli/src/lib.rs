//! Batch runner for the online Newton experiments: configuration handling,
//! result export and charts.

pub mod config;
pub mod experiment;
pub mod plot;

pub use config::{AlgoName, ExperimentConfig, FileConfig, Relaxation, Scenario};
pub use experiment::{run_experiment, simulate, Artifacts, ExperimentOutput, Row};
