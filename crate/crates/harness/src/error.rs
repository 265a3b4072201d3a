use thiserror::Error;

/// Errors split by exit status: configuration problems are detected before
/// any simulation runs.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

impl From<cmabt_algos::AlgoError> for HarnessError {
    fn from(e: cmabt_algos::AlgoError) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<cmabt_envs::EnvError> for HarnessError {
    fn from(e: cmabt_envs::EnvError) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<cmabt_core::CoreError> for HarnessError {
    fn from(e: cmabt_core::CoreError) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<cmabt_oracles::OracleError> for HarnessError {
    fn from(e: cmabt_oracles::OracleError) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
