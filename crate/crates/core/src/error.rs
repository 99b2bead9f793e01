use num_complex::Complex64;

use crate::dense::DenseError;
use crate::interval::Space;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("coefficient a_{component} = {value} at s = {s} is below the positivity floor {a_min}")]
    PositivityViolation {
        component: usize,
        s: f64,
        value: f64,
        a_min: f64,
    },
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("space mismatch: expected {expected}, found {found}")]
    TagMismatch { expected: Space, found: Space },
    #[error("boundary constraint has rank {rank}, expected {expected}")]
    DegenerateConstraint {
        rank: usize,
        expected: usize,
        /// Null space of the constraint, still usable as a domain basis.
        basis: crate::dense::Matrix,
    },
    #[error("λ = {lambda} is a pole of the {what} resolvent")]
    ResolventPole { lambda: Complex64, what: String },
    #[error("λ = {lambda} lies in the spectrum of {what}")]
    SpectrumHit { lambda: Complex64, what: String },
    #[error("assumption {name} failed: {detail}")]
    AssumptionFailed { name: String, detail: String },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("relative bound fails: {0}")]
    BoundFails(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Whether the error is a numerical breakdown (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Dense(_)
                | Error::ResolventPole { .. }
                | Error::SpectrumHit { .. }
                | Error::DegenerateConstraint { .. }
        )
    }
}
