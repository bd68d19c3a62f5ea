use thiserror::Error;

use crate::exactalg::{AlgebraError, Rational};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("divisors or cycles belong to different configurations")]
    ConfigMismatch,
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("unknown curve {0:?}")]
    UnknownCurve(String),
    #[error("cycle is not negative definite: leading minor of order {order} is {minor}")]
    NotNegativeDefinite { order: usize, minor: Rational },
    #[error("component {curve} lies outside the cycle")]
    SupportViolation { curve: String },
    #[error("divisor is not effective: coefficient of {curve} is {coeff}")]
    NotEffective { curve: String, coeff: Rational },
    #[error("divisor is not pseudo-effective: {0}")]
    NotPseudoEffective(String),
    #[error(
        "accumulated cycle at step {step} is not negative definite \
         (leading minor of order {order} is {minor}); the pseudo-effectivity certificate is invalid"
    )]
    InternalNegdefViolation {
        step: usize,
        order: usize,
        minor: Rational,
    },
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("instance generation exhausted after {0} attempts")]
    GenerationExhausted(usize),
}

impl Error {
    /// Errors that mean "no decomposition exists for this input" as opposed
    /// to malformed input.
    pub fn is_obstruction(&self) -> bool {
        matches!(
            self,
            Error::NotNegativeDefinite { .. }
                | Error::NotPseudoEffective(_)
                | Error::InternalNegdefViolation { .. }
        )
    }

    /// Stable machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Algebra(_) => "Algebra",
            Error::ConfigMismatch => "ConfigMismatch",
            Error::InvalidConfiguration(_) => "InvalidConfiguration",
            Error::UnknownCurve(_) => "UnknownCurve",
            Error::NotNegativeDefinite { .. } => "NotNegativeDefinite",
            Error::SupportViolation { .. } => "SupportViolation",
            Error::NotEffective { .. } => "NotEffective",
            Error::NotPseudoEffective(_) => "NotPseudoEffective",
            Error::InternalNegdefViolation { .. } => "InternalNegdefViolation",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::GenerationExhausted(_) => "GenerationExhausted",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
