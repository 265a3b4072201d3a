use cmabt_core::CoreError;
use cmabt_oracles::OracleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("sampler failed: {0}")]
    Sampler(String),
    #[error("infeasible action: {0}")]
    InfeasibleAction(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<EnvError> for CoreError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::Core(c) => c,
            EnvError::InfeasibleAction(s) => CoreError::InfeasibleAction(s),
            other => CoreError::InvalidParams(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, EnvError>;
