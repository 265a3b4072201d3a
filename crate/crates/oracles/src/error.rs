use cmabt_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("k = {k} exceeds the {m} available arms")]
    KTooLarge { k: usize, m: usize },
    #[error("weight of arm {0} is NaN")]
    NanWeight(usize),
    #[error("feasible set has about {size} actions, above the enumeration limit {limit}")]
    FeasibleTooLarge { size: u128, limit: u128 },
    #[error("feasible set is empty")]
    EmptyFeasible,
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("exact spread needs 2^{edges} live-edge worlds; limit is 2^{limit}")]
    TooManyEdges { edges: usize, limit: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, OracleError>;
