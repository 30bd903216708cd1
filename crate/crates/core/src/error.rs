use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("outside evaluation domain: {reason}")]
    Domain { reason: String, point: Vec<[f64; 2]> },

    #[error("component {component} has a denominator vanishing at e1")]
    NotSmoothAtE1 { component: usize },

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("limit of {quantity} did not settle (successive extrapolants differ by {residual:e})")]
    DivergentLimit { quantity: String, residual: f64 },

    #[error("G(r e1) does not decay along the radius (norm {finest_norm:e} at the finest point)")]
    NotANullPoint { finest_norm: f64 },

    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },

    #[error("least-squares system is ill conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("jet of order {have} is too low, order {need} required")]
    JetOrderTooLow { have: usize, need: usize },

    #[error("jet is not shifted to dilation 0 (T[1,1] = {t11:e})")]
    NotShifted { t11: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid slice direction: {0}")]
    InvalidSlice(String),

    #[error("unknown example '{0}'")]
    UnknownExample(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid field description: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn domain(reason: impl Into<String>, point: &[num_complex::Complex64]) -> Self {
        Error::Domain {
            reason: reason.into(),
            point: point.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}
