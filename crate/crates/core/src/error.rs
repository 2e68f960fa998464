use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("non-finite value at r = {r}: {what}")]
    Evaluation { r: f64, what: String },

    #[error("accuracy failure: {what} (residual {residual:e})")]
    Accuracy { what: String, residual: f64 },

    #[error("singular point r = {0} (the weight and phase are not differentiable there)")]
    SingularPoint(f64),

    #[error("no admissible tau0 up to {tau0_max}: worst margin {worst_margin:e} in family {family} at r = {r}")]
    SearchExhausted {
        tau0_max: f64,
        family: String,
        worst_margin: f64,
        r: f64,
    },

    #[error("factorization failed: zero pivot in column {0}")]
    Singular(usize),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidInput(msg.into()))
}

pub(crate) fn check_finite(r: f64, value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LabError::Evaluation {
            r,
            what: what.to_string(),
        })
    }
}
