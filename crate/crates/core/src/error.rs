use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("context mismatch: W({0},{1}) vs W({2},{3})")]
    ContextMismatch(usize, usize, usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("element does not square to zero")]
    NotSquareZero,

    #[error(
        "value is not a {degree}-form: lower-degree coefficient {residual:e} exceeds tolerance"
    )]
    NotAForm { degree: usize, residual: f64 },

    #[error("rank deficiency at {point:?}: expected rank {expected}, found {found}")]
    RankDeficient {
        point: Vec<f64>,
        expected: usize,
        found: usize,
    },

    #[error("missing representation: {0}")]
    MissingRepresentation(String),

    #[error("no principal logarithm: {0}")]
    LogBranch(String),

    #[error("left the chart domain at {0:?}")]
    LeftChart(Vec<f64>),

    #[error("step count must be positive")]
    StepUnderflow,

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Whether the failure is a numeric one (rank drop, domain, log branch)
    /// rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::NotSquareZero
                | Error::NotAForm { .. }
                | Error::RankDeficient { .. }
                | Error::LogBranch(_)
                | Error::LeftChart(_)
                | Error::StepUnderflow
        )
    }
}
