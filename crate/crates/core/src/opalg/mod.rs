//! Symbolic bosonic operator algebra.
//!
//! Expressions are sums of scalar-weighted products of creation/annihilation
//! operators on discrete (`a`) or frequency-labelled continuous (`a(w)`)
//! modes. Rewriting into normal or antinormal order applies the commutation
//! relations, turning discrete same-mode swaps into unit contractions and
//! continuous ones into formal `delta(w - w')` factors. Expectation values
//! against vacuum and coherent assignments evaluate the ordered result,
//! using the stationary-field contraction for symbolic continuous inputs.
//!
//! All values are immutable; every operation is a pure function.

pub mod expect;
pub mod expr;
pub mod parse;
pub mod scalar;
mod squeezer;

use thiserror::Error;

pub use expect::{expectation, Expectation, ExpectationTerm, ModeState, StateSpec};
pub use expr::{Delta, Kernel, ModeLabel, OpFactor, OperatorExpr, OperatorTerm, OrderKind};
pub use parse::{parse_expr, ParseError};
pub use scalar::Scalar;
pub use squeezer::expand_squeezer_action;

#[derive(Debug, Error)]
pub enum OpalgError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("mode '{0}' has no state assignment")]
    UnassignedMode(String),
    #[error("symbolic coherent mode '{0}' has unbalanced creators/annihilators; moment is phase dependent")]
    PhaseDependentSymbolic(String),
    #[error("continuous coherent mode '{0}' requires a symbolic mean occupation")]
    ContinuousNumericAmplitude(String),
    #[error("squeezer expansion order {0} unsupported (only 1 and 2)")]
    UnsupportedOrder(u32),
    #[error("invalid squeezer expansion target: {0}")]
    InvalidSqueezerTarget(String),
    #[error("result still carries formal factors; bind or integrate them out first")]
    FormalResult,
    #[error("no binding provided for symbol '{0}'")]
    UnboundSymbol(String),
}

/// Rewrite with all creators to the left of annihilators.
pub fn normal_order(e: &OperatorExpr) -> OperatorExpr {
    e.reorder(OrderKind::Normal)
}

/// Rewrite with all annihilators to the left of creators.
pub fn antinormal_order(e: &OperatorExpr) -> OperatorExpr {
    e.reorder(OrderKind::Antinormal)
}
