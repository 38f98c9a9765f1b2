use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("observable is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("observable is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("weak value undefined: |<f|i>| = {overlap:e} is below 1e-14")]
    OverlapZero { overlap: f64 },

    #[error("exact evolution only supports theta = 0 or pi/2, got {theta}")]
    UnsupportedAxis { theta: f64 },

    #[error("density is below 1e-300 everywhere on the integration grid")]
    NumericalUnderflow,

    #[error("detector saturated: arrival probability {p_arrival} exceeds p_sat = {p_sat}")]
    SaturatedDetector { p_arrival: f64, p_sat: f64 },

    #[error("no trials survived postselection")]
    EmptyBatch,

    #[error("estimator undefined: the coefficient of g in the mean is zero")]
    NullCoefficient,

    #[error("grid needs a positive even number of intervals and lo < hi (lo {lo}, hi {hi}, intervals {intervals})")]
    InvalidGrid { lo: f64, hi: f64, intervals: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn require_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
