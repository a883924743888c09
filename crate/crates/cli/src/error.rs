use multijames::ingest::IngestError;
use multijames::sim::SimError;
use multijames::verify::VerifyError;
use multijames::{Error, GraphError, UndefinedReason};
use thiserror::Error;

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_UNDEFINED: u8 = 2;
pub const EXIT_GRAPH: u8 = 3;
pub const EXIT_PARSE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("probability is undefined: {0}")]
    Undefined(UndefinedReason),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Undefined(_) => EXIT_UNDEFINED,
            CliError::Graph(_) => EXIT_GRAPH,
            CliError::Parse(_) | CliError::Io { .. } => EXIT_PARSE,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UndefinedContest(reason) => CliError::Undefined(reason),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Undefined(reason) => CliError::Undefined(reason),
            SimError::InvalidConfig(_) => CliError::Parse(e.to_string()),
            SimError::AllTrialsAbandoned { .. } => CliError::Failed(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        CliError::Parse(e.to_string())
    }
}
