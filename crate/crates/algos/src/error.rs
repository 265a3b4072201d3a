use cmabt_core::CoreError;
use cmabt_envs::EnvError;
use cmabt_oracles::OracleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgoError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("algorithm `{alg}` does not apply to {env} environments")]
    Unsupported { alg: String, env: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

pub type Result<T> = std::result::Result<T, AlgoError>;
