use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure in {what}: achieved error estimate {error_estimate:e}")]
    NumericFailure { what: String, error_estimate: f64 },

    #[error("value {value:e} out of range: {detail}")]
    OutOfRange { value: f64, detail: String },

    #[error("criterion integral diverges: {0}")]
    CriterionInfinite(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(
        "time step underflow at t = {t:e} (dt = {dt:e}); refine the grid or \
         choose parameters away from the stiff regime (or set a regularization epsilon for p < 2)"
    )]
    Stiffness { t: f64, dt: f64 },

    #[error(
        "support reached the outer boundary r_max = {r_max} at t = {t:e}; \
         enlarge r_max or shorten t_end"
    )]
    SupportHitsBoundary { t: f64, r_max: f64 },

    #[error("envelope undefined: {0}")]
    EnvelopeUndefined(String),

    #[error("fit refused: {0}")]
    FitRefused(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
