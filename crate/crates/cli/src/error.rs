//! CLI failures and their process exit codes.

use cyclekit::io::{LoadError, LoadErrors};
use cyclekit::network::{DofReport, NetworkError};
use cyclekit::workflow::WorkflowError;
use thiserror::Error;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_FILE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Load(LoadErrors),
    #[error("model is not well-posed: {}", .0.status)]
    NotWellPosed(Box<DofReport>),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Workflow(WorkflowError),
    #[error("{0}")]
    Solver(String),
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("server: {0}")]
    Serve(std::io::Error),
}

impl From<WorkflowError> for CliError {
    fn from(e: WorkflowError) -> Self {
        match e {
            WorkflowError::Network(NetworkError::NotWellPosed(r)) => CliError::NotWellPosed(Box::new(r)),
            e => CliError::Workflow(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Load(errs) if errs.0.iter().all(|e| matches!(e, LoadError::Io { .. } | LoadError::Fluids(_))) => EXIT_FILE,
            CliError::Load(_) | CliError::NotWellPosed(_) | CliError::Invalid(_) => EXIT_VALIDATION,
            CliError::Workflow(WorkflowError::SolverFailed(_) | WorkflowError::NonPhysicalSizing { .. }) | CliError::Solver(_) => EXIT_SOLVER,
            CliError::Workflow(_) => EXIT_VALIDATION,
            CliError::Write { .. } | CliError::Serve(_) => EXIT_FILE,
        }
    }
}
