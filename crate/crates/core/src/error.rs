use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("arm {arm} out of range for {m} arms")]
    ArmOutOfRange { arm: usize, m: usize },
    #[error("action contains duplicate arm {0}")]
    DuplicateArm(usize),
    #[error("record {index}: {reason}")]
    MalformedRecord { index: usize, reason: String },
    #[error("invalid confidence parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible action: {0}")]
    InfeasibleAction(String),
    #[error("dataset line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
