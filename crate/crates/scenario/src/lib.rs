//! Config-driven scenarios for enlarged-space simulations.
//!
//! A scenario alternates exact or split-step evolution segments with
//! instantaneous Pauli gates on the symmetry axis, sampling frame observables
//! at every checkpoint. [`check`] bundles the library invariants into one
//! report and [`sweep`] repeats a scenario over values of one config field.

pub mod check;
pub mod config;
pub mod runner;
pub mod sweep;

pub use check::{run_check_suite, CheckHooks, CheckReport, CheckResult};
pub use config::{parse_config, ScenarioConfig};
pub use runner::{run_scenario, RunResult};
pub use sweep::{run_sweep, SweepResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config error in {field}: {message}")]
    Config { field: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        ScenarioError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// 0 success, 1 config error, 2 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config { .. } | ScenarioError::Io(_) => 1,
            ScenarioError::Numerical(_) => 2,
        }
    }
}

impl From<enlarge_core::Error> for ScenarioError {
    fn from(e: enlarge_core::Error) -> Self {
        use enlarge_core::Error as E;
        match e {
            E::Io(io) => ScenarioError::Io(io),
            other => ScenarioError::config("scenario", other.to_string()),
        }
    }
}

pub type Result<T, E = ScenarioError> = std::result::Result<T, E>;
