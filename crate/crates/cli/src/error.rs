use dendritic_core::checkpoint::CheckpointError;
use dendritic_core::data::DataError;
use dendritic_core::NetworkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("output: {0}")]
    Output(String),
    #[error("data: {0}")]
    Data(#[from] DataError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl CliError {
    /// 0 success, 1 usage/config, 2 data, 3 checkpoint.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Data(_) => 2,
            CliError::Checkpoint(_) => 3,
        }
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        CliError::Checkpoint(e.to_string())
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::ShapeMismatch { .. } => CliError::Checkpoint(e.to_string()),
            NetworkError::InvalidConfig(msg) => CliError::Config(msg),
            other => CliError::Data(DataError::Io {
                path: "<event stream>".into(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, other.to_string()),
            }),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
