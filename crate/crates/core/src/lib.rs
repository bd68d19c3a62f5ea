//! Exact Zariski decompositions of ℚ-divisors on a surface modeled by a
//! finite curve configuration and its rational intersection matrix.
//!
//! * [`exactalg`]: rationals, determinants, definiteness tests, simplex.
//! * [`surface`]: configurations, divisors, cycles and the intersection pairing.
//! * [`decomp`]: the decomposition algorithms.
//! * [`oracle`]: independent verifiers and instance generators.
//! * [`cli`]: file formats and the `zariski` command.

pub mod cli;
pub mod decomp;
mod error;
pub mod exactalg;
pub mod oracle;
pub mod surface;

pub use error::{Error, Result};
