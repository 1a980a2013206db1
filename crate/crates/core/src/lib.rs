//! Langevin boundary-value problems with two Hadamard fractional derivatives.
//!
//! ```text
//! D^β (D^α − λ) x(t) = f(t, x(t)),   1 < t < e,
//! (D^α − λ) x(e) = 0,                I^{1−α} x(1⁺) = c0
//! ```
//!
//! The problem is solved through its Volterra/Mittag-Leffler representation
//! in the log variable u = ln t, by Picard iteration in the weighted space
//! with norm sup |(ln t)^γ x(t)|. [`solvability`] evaluates the constants
//! ω1, ω2 and the existence/uniqueness conditions L1·ω2 < 1 and L·ω2 < 1.

pub mod benchmark;
pub mod expr;
pub mod hadamard;
pub mod io;
pub mod langevin;
pub mod solvability;
pub mod special;

use thiserror::Error;

pub use expr::{parse, EvalError, Expr, ParseError, SourceSpan};
pub use hadamard::{make_grid, Endpoint, GridFunction, LogGrid, VolterraWeights};
pub use langevin::{picard_solve, LangevinOperator, PicardResult, ProblemSpec};
pub use solvability::{certify, GrowthBounds, SolvabilityReport};
pub use special::{beta_fn, erfc, gamma, mittag_leffler, MlParams, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluating f at node {node}: {source}")]
    Eval { node: usize, source: EvalError },
}

pub(crate) fn param_error(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
