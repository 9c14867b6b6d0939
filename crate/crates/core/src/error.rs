use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid base {0}: bases must be at least 2")]
    InvalidBase(u64),
    #[error("digit {digit} out of range for base {base}")]
    InvalidDigit { digit: u64, base: u64 },
    #[error("sequence is empty")]
    EmptySequence,
    #[error("interval family is empty")]
    EmptyFamily,
    #[error("point {0} is not in [0,1)")]
    PointOutOfRange(String),
    #[error("invalid interval [{lower}, {upper})")]
    InvalidInterval { lower: String, upper: String },
    #[error("block of length {len} is shorter than {needed}")]
    BlockTooShort { len: usize, needed: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("bases {0} and {1} are multiplicatively dependent")]
    DependentBases(u64, u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precision cap reached at {bits} bits without a decision")]
    PrecisionCap { bits: u32 },
    #[error("{what} needs {needed} but the execution budget is {budget}")]
    BudgetExceeded { what: String, needed: String, budget: String },
    #[error("predicate oracle exceeded its step budget of {0}")]
    OracleBudget(u64),
    #[error("stage {stage}: no candidate satisfies {check}")]
    NoCandidate { stage: u64, check: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}
