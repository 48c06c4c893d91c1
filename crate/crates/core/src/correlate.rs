//! Continuous-mode detection quantities: singles, coincidences, and the
//! modified antinormally ordered intensity correlation
//! `1 + gamma [1/(nbar+1) + nbar/(nbar+1)^2]`.
//!
//! The stationary approximation `alpha*(w) alpha(w') -> nbar delta(w - w')`
//! is baked into these formulas, and coincidences keep only the
//! second-order pair term, matching the perturbative order of the
//! underlying expansion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_complex::Complex;

use crate::fock::{validate_splitter, FockError};
use crate::real::Real;

#[derive(Debug, Error)]
pub enum CorrelateError {
    #[error("mean photon number must be >= 0, got {0}")]
    NegativeOccupation(f64),
    #[error("gamma must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),
    #[error("diagonal spectral integral must be positive")]
    NonPositiveDiagonal,
    #[error("exchange integral negative beyond quadrature tolerance")]
    NegativeCross,
    #[error("occupation grid must be ascending and nonnegative")]
    BadGrid,
    #[error(transparent)]
    Splitter(#[from] FockError),
}

/// Stationary coherent input with mean photon number `nbar`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CoherentInput<R: Real> {
    pub n_bar: R,
    pub stationary: bool,
}

impl<R: Real> CoherentInput<R> {
    pub fn new(n_bar: R) -> Result<Self, CorrelateError> {
        if n_bar < R::zero() {
            return Err(CorrelateError::NegativeOccupation(n_bar.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(CoherentInput { n_bar, stationary: true })
    }

    pub fn vacuum() -> Self {
        CoherentInput { n_bar: R::zero(), stationary: true }
    }
}

/// Frequency-independent detection parameters of the two arms.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DetectionParams<R: Real> {
    pub eta_1: R,
    pub eta_2: R,
    pub t: Complex<R>,
    pub r: Complex<R>,
    pub zeta_mag: R,
}

impl<R: Real> DetectionParams<R> {
    pub fn validate(&self) -> Result<(), CorrelateError> {
        validate_splitter(self.t, self.r)?;
        for eta in [self.eta_1, self.eta_2] {
            if eta < R::zero() || eta > R::one() {
                return Err(FockError::EtaOutOfRange(eta.to_f64().unwrap_or(f64::NAN)).into());
            }
        }
        if self.zeta_mag < R::zero() {
            return Err(CorrelateError::NegativeOccupation(
                self.zeta_mag.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(())
    }
}

/// The two spectral integrals entering the detection formulas.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectralIntegrals<R: Real> {
    /// `I_diag = int dw dw1 |xi(w)|^2 |Phi(w1, w)|^2`.
    pub i_diag: R,
    /// Fourfold exchange integral; `gamma = i_cross / i_diag^2`.
    pub i_cross: R,
}

impl<R: Real> SpectralIntegrals<R> {
    pub fn gamma(&self) -> R {
        self.i_cross / (self.i_diag * self.i_diag)
    }
}

/// Full correlation report for one configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationReport<R: Real> {
    pub n1: R,
    pub n2: R,
    pub n12: R,
    pub g2: R,
    pub gamma_used: R,
    pub spectral_integrals: SpectralIntegrals<R>,
    pub warnings: Vec<String>,
}

/// Singles rates
/// `N1 = eta1 |T|^2 |zeta|^2 I_diag (nbar + 1)` and the mirrored `N2`.
pub fn singles<R: Real>(
    input: &CoherentInput<R>,
    det: &DetectionParams<R>,
    integrals: &SpectralIntegrals<R>,
) -> Result<(R, R), CorrelateError> {
    det.validate()?;
    if input.n_bar < R::zero() {
        return Err(CorrelateError::NegativeOccupation(
            input.n_bar.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if integrals.i_diag <= R::zero() {
        return Err(CorrelateError::NonPositiveDiagonal);
    }
    let z2 = det.zeta_mag * det.zeta_mag;
    let stim = input.n_bar + R::one();
    let n1 = det.eta_1 * det.t.norm_sqr() * z2 * integrals.i_diag * stim;
    let n2 = det.eta_2 * det.r.norm_sqr() * z2 * integrals.i_diag * stim;
    Ok((n1, n2))
}

/// Coincidence rate
/// `N12 = eta1 eta2 |T|^2 |R|^2 |zeta|^4 [I_diag^2 (nbar+1)^2 + I_cross (2 nbar + 1)]`.
pub fn coincidences<R: Real>(
    input: &CoherentInput<R>,
    det: &DetectionParams<R>,
    integrals: &SpectralIntegrals<R>,
) -> Result<R, CorrelateError> {
    det.validate()?;
    if integrals.i_diag <= R::zero() {
        return Err(CorrelateError::NonPositiveDiagonal);
    }
    if integrals.i_cross < -R::from_f64_lit(1e-9) * integrals.i_diag * integrals.i_diag {
        return Err(CorrelateError::NegativeCross);
    }
    let z4 = (det.zeta_mag * det.zeta_mag) * (det.zeta_mag * det.zeta_mag);
    let stim = input.n_bar + R::one();
    let pair = R::from_f64_lit(2.0) * input.n_bar + R::one();
    Ok(det.eta_1
        * det.eta_2
        * det.t.norm_sqr()
        * det.r.norm_sqr()
        * z4
        * (integrals.i_diag * integrals.i_diag * stim * stim + integrals.i_cross * pair))
}

/// The modified antinormally ordered intensity correlation
/// `1 + gamma [1/(nbar+1) + nbar/(nbar+1)^2]`. Equals
/// `coincidences / (singles product)` when `gamma = I_cross / I_diag^2`;
/// every detector parameter cancels algebraically, so the value contains no
/// `eta`, `T`, or `R` by construction.
pub fn modified_g2<R: Real>(n_bar: R, gamma: R) -> Result<R, CorrelateError> {
    if n_bar < R::zero() {
        return Err(CorrelateError::NegativeOccupation(n_bar.to_f64().unwrap_or(f64::NAN)));
    }
    if gamma < R::zero() || gamma > R::one() {
        return Err(CorrelateError::GammaOutOfRange(gamma.to_f64().unwrap_or(f64::NAN)));
    }
    let np1 = n_bar + R::one();
    Ok(R::one() + gamma * (R::one() / np1 + n_bar / (np1 * np1)))
}

/// Assemble the full report from the spectral integrals.
pub fn evaluate<R: Real>(
    input: &CoherentInput<R>,
    det: &DetectionParams<R>,
    integrals: &SpectralIntegrals<R>,
) -> Result<CorrelationReport<R>, CorrelateError> {
    let (n1, n2) = singles(input, det, integrals)?;
    let n12 = coincidences(input, det, integrals)?;
    let g2 = n12 / (n1 * n2);
    let gamma = integrals.gamma();
    let mut warnings = Vec::new();
    let occupancy = det.zeta_mag.sinh().powi(2) * (input.n_bar + R::one());
    if occupancy > R::from_f64_lit(0.2) {
        warnings.push(format!(
            "sinh^2|zeta| (nbar+1) = {:.3} > 0.2: O(zeta^4) truncation of the coincidence formula is strained",
            occupancy.to_f64().unwrap_or(f64::NAN)
        ));
    }
    Ok(CorrelationReport {
        n1,
        n2,
        n12,
        g2,
        gamma_used: gamma,
        spectral_integrals: *integrals,
        warnings,
    })
}

/// Plot-ready `(nbar, g2)` rows over an ascending occupation grid.
pub fn g2_curve<R: Real>(gamma: R, n_bar_grid: &[R]) -> Result<Vec<(R, R)>, CorrelateError> {
    if n_bar_grid.is_empty()
        || n_bar_grid[0] < R::zero()
        || n_bar_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(CorrelateError::BadGrid);
    }
    n_bar_grid.iter().map(|&n| Ok((n, modified_g2(n, gamma)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn det(eta_1: f64, eta_2: f64, cos: f64, zeta: f64) -> DetectionParams<f64> {
        let sin = (1.0 - cos * cos).sqrt();
        DetectionParams {
            eta_1,
            eta_2,
            t: Complex64::new(cos, 0.0),
            r: Complex64::new(0.0, sin),
            zeta_mag: zeta,
        }
    }

    const I: SpectralIntegrals<f64> = SpectralIntegrals { i_diag: 1.0, i_cross: 0.894 };

    #[test]
    fn singles_examples() {
        let d = det(0.35, 0.6, 0.8, 0.1);
        let (n1_vac, _) = singles(&CoherentInput::vacuum(), &d, &I).unwrap();
        assert!((n1_vac - 0.35 * 0.64 * 0.01).abs() < 1e-15);
        let (n1, _) = singles(&CoherentInput::new(3.0).unwrap(), &d, &I).unwrap();
        assert!((n1 / n1_vac - 4.0).abs() < 1e-12);
        let dz = det(0.0, 0.6, 0.8, 0.1);
        let (zero, _) = singles(&CoherentInput::vacuum(), &dz, &I).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn coincidences_limits() {
        let d = det(0.5, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.1);
        // factorizable: I_cross = I_diag^2 -> N12 twice the Poissonian value at nbar = 0
        let fact = SpectralIntegrals { i_diag: 2.0, i_cross: 4.0 };
        let n12 = coincidences(&CoherentInput::vacuum(), &d, &fact).unwrap();
        let poisson = coincidences(
            &CoherentInput::vacuum(),
            &d,
            &SpectralIntegrals { i_diag: 2.0, i_cross: 0.0 },
        )
        .unwrap();
        assert!((n12 / poisson - 2.0).abs() < 1e-12);
        // nbar -> infinity: g2 -> 1
        let big = CoherentInput::new(1e9).unwrap();
        let (n1, n2) = singles(&big, &d, &fact).unwrap();
        let n12 = coincidences(&big, &d, &fact).unwrap();
        assert!((n12 / (n1 * n2) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn modified_g2_pinned_values() {
        assert_eq!(modified_g2(0.0, 1.0).unwrap(), 2.0);
        assert_eq!(modified_g2(1.0, 1.0).unwrap(), 1.75);
        assert_eq!(modified_g2(0.0, 0.45).unwrap(), 1.45);
        assert!(modified_g2(-0.5, 1.0).is_err());
        assert!(modified_g2(0.0, 1.5).is_err());
    }

    #[test]
    fn ratio_equals_modified_g2_and_detectors_cancel() {
        let gamma = I.gamma();
        for (e1, e2, cos, nbar) in
            [(0.3, 0.9, 0.6, 0.0), (0.15, 0.45, 0.9, 1.0), (1.0, 0.2, 0.3, 2.5)]
        {
            let d = det(e1, e2, cos, 0.08);
            let input = CoherentInput::new(nbar).unwrap();
            let report = evaluate(&input, &d, &I).unwrap();
            let direct = modified_g2(nbar, gamma).unwrap();
            assert!(
                (report.g2 - direct).abs() < 1e-12 * direct,
                "({e1},{e2},{cos},{nbar}): {} vs {direct}",
                report.g2
            );
            assert!((report.g2 - report.n12 / (report.n1 * report.n2)).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_rows_and_grid_validation() {
        let rows = g2_curve(1.0_f64, &[0.0, 1.0, 1e6]).unwrap();
        assert_eq!(rows[0].1, 2.0);
        assert_eq!(rows[1].1, 1.75);
        assert!((rows[2].1 - 1.0).abs() < 1e-5);
        // monotone decreasing for gamma > 0
        assert!(rows[0].1 > rows[1].1 && rows[1].1 > rows[2].1);
        let flat = g2_curve(0.0, &[0.0, 0.5, 2.0]).unwrap();
        assert!(flat.iter().all(|r| r.1 == 1.0));
        assert!(matches!(g2_curve(1.0, &[1.0, 0.5]), Err(CorrelateError::BadGrid)));
        assert!(matches!(g2_curve(1.0, &[]), Err(CorrelateError::BadGrid)));
    }

    #[test]
    fn excess_correlation_is_nonnegative() {
        for gamma in [0.0, 0.3, 1.0] {
            for nbar in [0.0, 0.7, 5.0, 1e4] {
                let g = modified_g2(nbar, gamma).unwrap();
                assert!(g >= 1.0);
                if gamma == 0.0 {
                    assert_eq!(g, 1.0);
                }
            }
        }
    }
}
