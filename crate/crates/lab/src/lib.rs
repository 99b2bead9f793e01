//! Configuration-driven runner for the `wentzell-core` experiments.

pub mod config;
pub mod report;
pub mod runner;

pub use config::ExperimentConfig;
pub use report::{emit_report, ReportEnvelope, Table};
pub use runner::{execute, run, Outcome, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{command}: {source}")]
    Core {
        command: &'static str,
        #[source]
        source: wentzell_core::Error,
    },
    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    /// 2 for anything wrong with the input, 3 for numerical breakdowns.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core { source, .. } if source.is_numerical() => 3,
            _ => 2,
        }
    }
}
