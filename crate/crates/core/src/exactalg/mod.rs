//! Exact rational arithmetic and linear algebra. No floating point.

mod lp;
mod matrix;
mod rational;

use thiserror::Error;

pub use lp::{
    lp_optimize, Bound, Constraint, Direction, LinearProgram, LpSolution, LpStatus, Relation,
};
pub use matrix::{
    all_principal_minors_nonneg, all_principal_minors_nonneg_with_limit,
    all_principal_minors_positive, determinant, is_negative_definite, leading_principal_minors,
    solve_linear, sylvester_negative_definite, RatMatrix, SylvesterTest, DEFAULT_MINOR_LIMIT,
};
pub use rational::{
    dot, format_rational, int, is_nonneg, parse_rational, rat, vec_leq, zeros, RatVector, Rational,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NonSymmetric { row: usize, col: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension {dim} exceeds the principal-minor limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("malformed rational {0:?}")]
    Parse(String),
}
