use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("truncated Fock space of dimension {dim} exceeds the budget of {budget}")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("eigendecomposition failed: {0}")]
    EigendecompositionFailure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),

    #[error(
        "fit window ends at t = {t_end} but the bath recurs at t = {recurrence_time}; \
         windows must end by {half}",
        half = recurrence_time / 2.0
    )]
    RecurrenceWindow { t_end: f64, recurrence_time: f64 },

    #[error(transparent)]
    Core(#[from] decoherence::Error),
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;
