//! Scenario runner: config parsing, run records, exports and the
//! verification battery behind the `spin-torus` binary.

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod export;
pub mod record;
pub mod verify;

pub use config::{AngleGrid, GridSpec, InitialSpec, OutputKind, ProductSpec, ScenarioConfig, TimeGrid, TimeSpan};
pub use export::{export, ExportFormat};
pub use record::{run_scenario, GridSample, MetricOutput, OutputResult, Provenance, RunRecord, SCHEMA_VERSION};
pub use verify::{verify_all, verify_with, CheckOutcome, VerifyOptions, VerifyReport, DEFAULT_VERIFY_SEED};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid config at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ScenarioError {
    /// Process exit status for this error: 2 for config problems, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            ScenarioError::ConfigInvalid { .. } => 2,
            ScenarioError::Io { .. } => 3,
        }
    }
}
