//! Batch front end for the Toda solver: configuration, pipelines and
//! report emission.

pub mod app;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod run;

pub use config::{ExperimentConfig, Mode};
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use run::{certify_manifest, run, RunOptions, RunOutcome};
