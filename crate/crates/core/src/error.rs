use thiserror::Error;

use crate::domain::AccountId;
use crate::record::RecordId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("result vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("zero-norm result vector at position {0}")]
    ZeroNorm(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {required} results, got {got}")]
    TooFewResults { required: usize, got: usize },

    #[error("witness results not matched within delta_val = {delta_val}")]
    ResultsNotMatched { delta_val: f64 },

    #[error("unknown fishing record {0}")]
    UnknownRecord(RecordId),

    #[error("fishing record {0} already consumed")]
    RecordConsumed(RecordId),

    #[error("malformed appeal: {0}")]
    MalformedAppeal(String),

    #[error("lower bound undefined for lambda_y = {0} (requires lambda_y > 1)")]
    LowerBoundDomain(f64),

    #[error("empty feasible region: lower end {lo} >= upper end {hi}")]
    EmptyFeasibleRegion { lo: f64, hi: f64 },

    #[error("no active providers to schedule onto")]
    NoActiveProviders,

    #[error("unknown account {0}")]
    UnknownAccount(AccountId),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
