//! Configuration ingestion, sweep execution, and report emission for the
//! bus simulator: a flat key/value config format, a fixed-schema CSV with
//! an adjacent JSON echo, and the runners behind each subcommand.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{ConfigError, ConfigFile, SweepSpec};
pub use report::{parse_csv, write_csv, ReportRow, CSV_HEADER};
pub use runner::{run_compare, run_gate, run_purify, run_sweep, run_verify};

/// Stable process exit codes: 0 success, 1 check failure, 2 configuration
/// error.
#[derive(Clone, Debug)]
pub enum CliError {
    /// A verification or consistency check failed (exit 1).
    CheckFailure(String),
    /// Bad configuration, bad input values, or an unusable output path
    /// (exit 2).
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::CheckFailure(msg) => write!(f, "check failure: {msg}"),
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailure(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<qbus::Error> for CliError {
    fn from(e: qbus::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
