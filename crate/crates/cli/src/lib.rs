//! Experiment driver for the `l1tik` solvers: configuration files, batch
//! sweeps over solvers and noise levels, and the result files they produce.

pub mod config;
pub mod experiment;
pub mod verify;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig, SolverSettings};
pub use experiment::{run_experiment, write_instance, ExperimentError, Summary, SummaryRow};
