//! Numerically exact linear algebra on truncated multi-mode Fock spaces:
//! states, ladder operators, squeezer and beam-splitter unitaries, the loss
//! channel, and moment evaluation.
//!
//! States are value types; every channel returns a new state, so parameter
//! sweeps can evaluate states from concurrent tasks freely.

mod basis;
mod gates;
mod ladder;
mod state;

use thiserror::Error;

pub use basis::{FockBasis, DEFAULT_DIM_LIMIT};
pub use gates::{expm, splitter_gate, squeezer_gate, TwoModeGate, SQUEEZER_GUARD};
pub use ladder::LadderOp;
pub use state::{FockState, DEFAULT_LEAK_TOL, SPLITTER_TOL};

pub(crate) use state::validate_splitter;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("basis must have at least one mode")]
    EmptyBasis,
    #[error("basis dimension {dim} exceeds the configured limit {limit}")]
    DimensionLimit { dim: u128, limit: usize },
    #[error("mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("two-mode operation needs distinct modes, got {0} twice")]
    IdenticalModes(usize),
    #[error("truncation leak {leak:.3e} exceeds tolerance {tol:.3e}; raise the cutoff")]
    TruncationLeak { leak: f64, tol: f64 },
    #[error("splitter coefficients violate losslessness: |T|^2+|R|^2 defect {unit_defect:.3e}, TR*+RT* defect {cross_defect:.3e}")]
    NonUnitarySplitter { unit_defect: f64, cross_defect: f64 },
    #[error("loss transmissivity {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("coherent amplitude too large for the cutoff: |alpha|^2 = {nbar:.3} > cutoff/4 = {}", *.cutoff as f64 / 4.0)]
    AmplitudeTooLarge { nbar: f64, cutoff: usize },
    #[error("amplitude vector length does not match the basis dimension")]
    BasisMismatch,
    #[error("amplitudes exceed unit norm: {norm}")]
    NotNormalized { norm: f64 },
}
