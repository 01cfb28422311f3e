//! Configuration files, figure presets, scenario runs and CSV output.

mod config;
mod csv;
mod presets;
mod record;
mod scenarios;

pub use config::{parse_config, parse_config_with_overrides, ConfigError, Coupling, Grid, RunConfig, Scenario};
pub use csv::{format_number, read_spectrum_csv, Cell, CsvTable};
pub use presets::{preset, PRESET_NAMES};
pub use record::{content_hash, run_scenario, OutputFile, RunRecord, MANIFEST_FILE, CONFIG_SNAPSHOT_FILE};

use std::path::PathBuf;

use thiserror::Error;

use crate::atomic::AtomicError;
use crate::dynamics::DynamicsError;
use crate::linear_response::LinearResponseError;

/// Environment variable that fixes the worker-thread count.
pub const THREADS_ENV: &str = "POLARITON_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown preset `{0}` (available: {})", PRESET_NAMES.join(", "))]
    UnknownPreset(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Input { path: PathBuf, line: usize, message: String },
    #[error("{context}: {source}")]
    Atomic { context: String, source: AtomicError },
    #[error("{context}: {source}")]
    Linear { context: String, source: LinearResponseError },
    #[error("{context}: {source}")]
    Dynamics { context: String, source: DynamicsError },
}

impl HarnessError {
    /// Short machine-parsable category.
    pub fn category(&self) -> &'static str {
        match self {
            HarnessError::Config(_) | HarnessError::UnknownPreset(_) => "config",
            HarnessError::Io { .. } => "io",
            HarnessError::Input { .. } => "input",
            HarnessError::Atomic { .. } => "atomic",
            HarnessError::Linear { .. } => "linear",
            HarnessError::Dynamics { .. } => "dynamics",
        }
    }

    /// Process exit code; 2 is left to command-line usage errors.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 3,
            "io" => 4,
            "input" => 5,
            "atomic" => 6,
            "linear" => 7,
            _ => 8,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

/// Builds the global worker pool from [`THREADS_ENV`] if it is set, and
/// returns the thread count in use.
pub fn configure_threads() -> Result<usize, HarnessError> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            ConfigError::Invalid(vec![format!("{THREADS_ENV} = `{raw}` is not a positive integer")])
        })?;
        // A pool built earlier in the process keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}
