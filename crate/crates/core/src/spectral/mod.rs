//! Continuous-mode spectral machinery: filter and pump profiles, the joint
//! amplitude, filtered detection weights, and the photon-pair
//! indistinguishability factor gamma by quadrature and in closed form.

mod gamma;
mod profile;
mod quad;

use thiserror::Error;

pub use gamma::{
    gamma_closed_form, gamma_experiment_chain, gamma_general_4d, gamma_reduced_2d,
    GammaIntermediates, GammaResult, GAMMA_UPPER_SLACK,
};
pub use profile::{
    angular_fwhm_from_wavelength, filtered_weight, gaussian_variance_from_fwhm,
    lorentzian_half_width_from_fwhm, JointAmplitude, Mismatch, SpectralProfile,
};
pub use quad::{gauss_legendre, interval_nodes, profile_nodes, QuadratureRule, QuadratureSpec};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("profile width parameter must be positive")]
    NonPositiveWidth,
    #[error("tabulated profile needs a strictly increasing grid matching its values")]
    BadTable,
    #[error("quadrature needs at least 8 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("quadrature support and tolerance must be positive")]
    BadQuadratureSpec,
    #[error("this reduction applies to Gaussian filter and pump profiles only")]
    GaussianRequired,
    #[error("quadrature non-convergence: error estimate {estimate:.3e} exceeds tolerance {tol:.3e}")]
    NonConvergence { estimate: f64, tol: f64 },
    #[error("exchange integral came out negative beyond tolerance; quadrature failure")]
    NegativeNumerator,
    #[error("gamma = {0} outside [0, 1]; quadrature failure")]
    GammaOutOfRange(f64),
    #[error("chain factor {0} outside (0, 1]")]
    FactorOutOfRange(f64),
}
