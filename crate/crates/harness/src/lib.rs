//! Experiment configuration, execution, statistics and file output for
//! `firefly-core`.

pub mod bench;
pub mod config;
pub mod curves;
pub mod error;
pub mod experiment;
pub mod output;
pub mod stats;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiment::{execute, run_experiment, Outcome};
pub use stats::{aggregate, Summary};
