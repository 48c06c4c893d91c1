//! qcounter: antinormally ordered photodetection of continuous-mode fields.
//!
//! The crate models an emission-based (quantum-counter) detection scheme
//! built on stimulated parametric down-conversion:
//!
//! - [`opalg`] — symbolic bosonic operator algebra with normal/antinormal
//!   ordering and vacuum/coherent expectations;
//! - [`fock`] — exact linear algebra on truncated multi-mode Fock spaces;
//! - [`network`] — the Hanbury Brown–Twiss interferometer pipeline
//!   (squeezer, beam splitter, detector losses) plus phase-matching helpers;
//! - [`spectral`] — filter/pump profiles, the joint amplitude, and the
//!   photon-pair indistinguishability factor gamma by quadrature and in
//!   closed form;
//! - [`correlate`] — continuous-mode singles/coincidence formulas and the
//!   modified antinormal intensity correlation;
//! - [`mcsim`] — click-level Monte Carlo over the simulated network.
//!
//! Numeric modules are generic over the floating scalar through [`Real`];
//! the aliases below fix `f64`, which is what the command-line tool and the
//! acceptance suite use.

pub mod correlate;
pub mod fock;
pub mod mcsim;
pub mod network;
pub mod opalg;
mod real;
pub mod spectral;

pub use real::Real;

pub type FockBasis = fock::FockBasis;
pub type FockState64 = fock::FockState<f64>;
pub type NetworkSpec64 = network::NetworkSpec<f64>;
pub type NetworkReport64 = network::NetworkReport<f64>;
pub type SpectralProfile64 = spectral::SpectralProfile<f64>;
pub type JointAmplitude64 = spectral::JointAmplitude<f64>;
pub type GammaResult64 = spectral::GammaResult<f64>;
pub type QuadratureSpec64 = spectral::QuadratureSpec<f64>;
pub type CorrelationReport64 = correlate::CorrelationReport<f64>;
pub type CountRecord64 = mcsim::CountRecord<f64>;
