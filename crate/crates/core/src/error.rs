use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("empty preimage: {0}")]
    EmptyPreimage(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("enumeration budget exceeded: need {needed} entries, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("infeasible targets: {0}")]
    Infeasible(String),
    #[error("simulator cannot extend the transcript at length {0}")]
    Stuck(usize),
    #[error("hybrid steps out of order: {0}")]
    OutOfOrder(String),
    #[error("round {round}: {reason}")]
    Round { round: usize, reason: String },
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
