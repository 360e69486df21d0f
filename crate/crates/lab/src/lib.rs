//! Declarative experiment runner: JSON configs in, CSV and JSON results plus a
//! manifest out.

pub mod config;
pub mod run;
pub mod validate;

pub use config::{EnergyGrid, Experiment, ExperimentConfig};
pub use run::{run, run_with_threads, LabError, RunManifest};
pub use validate::{validate, Diagnostic, Severity};
