use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or input files.
    #[error("{0}")]
    Invalid(String),
    /// A desk-mode existence check failed.
    #[error("{0}")]
    Assertion(String),
    /// Precision, oracle or execution budget exhausted.
    #[error("{0}")]
    Budget(String),
    /// A verification suite found a counterexample.
    #[error("{0}")]
    Counterexample(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Counterexample(_) => 1,
            CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Assertion(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<nf_core::Error> for CliError {
    fn from(e: nf_core::Error) -> Self {
        use nf_core::Error as E;
        let msg = e.to_string();
        match e {
            E::NoCandidate { .. } | E::InvariantViolation(_) => CliError::Assertion(msg),
            E::PrecisionCap { .. } | E::BudgetExceeded { .. } | E::OracleBudget(_) => CliError::Budget(msg),
            _ => CliError::Invalid(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
