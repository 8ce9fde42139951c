//! Experiment runner for the nhsoc simulator: JSON configs in, CSV and JSON
//! artifacts plus a run manifest out.

pub mod config;
pub mod output;
pub mod run;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use output::RunManifest;
pub use run::{band_surface_scan, load, run, Overrides, RunError};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NHSOC_OUT_DIR";
