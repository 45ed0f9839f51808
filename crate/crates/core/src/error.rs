use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("nonconforming radial profile: {0}")]
    NonconformingProfile(String),

    #[error(
        "quadrature did not converge ({reason}): estimate {estimate:e}, error {error:e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureFailure {
        reason: &'static str,
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error(
        "ambiguous Bohr-frequency clustering near {near}: class spans {span}, \
         more than twice the tolerance {tolerance}"
    )]
    AmbiguousClustering { near: f64, span: f64, tolerance: f64 },

    #[error("degenerate system: {0}")]
    DegenerateSystem(String),

    #[error(
        "unsupported initial state `{0}`: supported states are logic1, logic2 and illustration"
    )]
    UnsupportedInitialState(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
