use thiserror::Error;

use decoherence_oracle::OracleError;

/// Process exit code for configuration and parameter errors.
pub const EXIT_VALIDATION: i32 = 2;
/// Process exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("{path}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Validation { path: String, line: Option<usize>, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation { path: path.into(), line: None, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<decoherence::Error> for CliError {
    fn from(e: decoherence::Error) -> Self {
        use decoherence::Error as E;
        match &e {
            E::InvalidParameter { field, reason } => CliError::validation(*field, reason.clone()),
            E::NonconformingProfile(_) => CliError::validation("form_factor", e.to_string()),
            E::DegenerateSystem(_) => CliError::validation("system", e.to_string()),
            E::UnsupportedInitialState(_) => CliError::validation("initial_state", e.to_string()),
            E::QuadratureFailure { .. } | E::AmbiguousClustering { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Core(inner) => inner.into(),
            OracleError::BudgetExceeded { .. } => CliError::validation("oracle", e.to_string()),
            OracleError::PreconditionViolation(_) | OracleError::DimensionMismatch { .. } => {
                CliError::validation("oracle", e.to_string())
            }
            OracleError::RecurrenceWindow { .. } => CliError::validation("oracle.fit_window", e.to_string()),
            OracleError::EigendecompositionFailure(_) | OracleError::IllConditionedFit(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
