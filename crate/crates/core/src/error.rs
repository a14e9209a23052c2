use thiserror::Error;

/// Errors raised by coefficient generation and the quadrature rules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("degree {degree} out of range (supported: {min}..={max})")]
    DegreeOutOfRange {
        degree: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid subdivision count {n}: {reason}")]
    InvalidSubdivisions { n: usize, reason: &'static str },

    #[error("node x = {x} lies outside the integrand domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("integrand returned non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("integrand evaluation failed at x = {x}: {message}")]
    Evaluation { x: f64, message: String },

    #[error("non-finite argument {0}")]
    NonFiniteArgument(f64),

    #[error("missing derivative callback of order {order}")]
    MissingDerivative { order: usize },

    #[error("dimension {dims} unsupported (supported: 1..={max})")]
    Dimension { dims: usize, max: usize },

    #[error("singular coefficient system for degree {degree}")]
    SingularSystem { degree: usize },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("invalid study: {0}")]
    InvalidStudy(String),
}

impl QuadError {
    /// True for failures raised while evaluating the integrand itself, as opposed to
    /// malformed requests.
    pub fn is_evaluation_failure(&self) -> bool {
        matches!(
            self,
            QuadError::OutsideDomain { .. }
                | QuadError::NonFinite { .. }
                | QuadError::Evaluation { .. }
        )
    }
}
