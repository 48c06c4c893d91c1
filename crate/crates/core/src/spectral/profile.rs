//! Spectral power profiles for the detection filter and the pump, and the
//! joint amplitude built from them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::real::Real;

/// A spectral power density `|xi(w)|^2` or `F_p(w)`. Unit-integral profiles
/// integrate to one; otherwise the peak value is one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SpectralProfile<R: Real> {
    Gaussian { center: R, variance: R, unit_integral: bool },
    Lorentzian { center: R, half_width: R, unit_integral: bool },
    Tabulated { grid: Vec<R>, values: Vec<R>, unit_integral: bool },
}

impl<R: Real> SpectralProfile<R> {
    /// Unit-integral Gaussian of the given variance.
    pub fn gaussian(center: R, variance: R) -> Result<Self, SpectralError> {
        if variance <= R::zero() {
            return Err(SpectralError::NonPositiveWidth);
        }
        Ok(SpectralProfile::Gaussian { center, variance, unit_integral: true })
    }

    /// Unit-integral Lorentzian of the given half-width at half-maximum.
    pub fn lorentzian(center: R, half_width: R) -> Result<Self, SpectralError> {
        if half_width <= R::zero() {
            return Err(SpectralError::NonPositiveWidth);
        }
        Ok(SpectralProfile::Lorentzian { center, half_width, unit_integral: true })
    }

    /// Tabulated profile with linear interpolation, clamped to zero outside
    /// the grid. When `normalize` is set the stored values are rescaled so
    /// the trapezoid integral over the grid is exactly one.
    pub fn tabulated(grid: Vec<R>, values: Vec<R>, normalize: bool) -> Result<Self, SpectralError> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(SpectralError::BadTable);
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpectralError::BadTable);
        }
        let mut values = values;
        if normalize {
            let mut integral = R::zero();
            for i in 1..grid.len() {
                integral += (values[i] + values[i - 1]) * (grid[i] - grid[i - 1])
                    / R::from_f64_lit(2.0);
            }
            if integral <= R::zero() {
                return Err(SpectralError::BadTable);
            }
            for v in &mut values {
                *v /= integral;
            }
        }
        Ok(SpectralProfile::Tabulated { grid, values, unit_integral: normalize })
    }

    pub fn center(&self) -> R {
        match self {
            SpectralProfile::Gaussian { center, .. } => *center,
            SpectralProfile::Lorentzian { center, .. } => *center,
            SpectralProfile::Tabulated { grid, .. } => {
                (grid[0] + grid[grid.len() - 1]) / R::from_f64_lit(2.0)
            }
        }
    }

    /// Variance of the power profile, when defined in closed form.
    pub fn variance(&self) -> Option<R> {
        match self {
            SpectralProfile::Gaussian { variance, .. } => Some(*variance),
            _ => None,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, SpectralProfile::Gaussian { .. })
    }

    /// Profile value at `omega`.
    pub fn value(&self, omega: R) -> R {
        match self {
            SpectralProfile::Gaussian { center, variance, unit_integral } => {
                let two = R::from_f64_lit(2.0);
                let x = omega - *center;
                let shape = (-x * x / (two * *variance)).exp();
                if *unit_integral {
                    shape / (two * R::PI() * *variance).sqrt()
                } else {
                    shape
                }
            }
            SpectralProfile::Lorentzian { center, half_width, unit_integral } => {
                let x = omega - *center;
                let g2 = *half_width * *half_width;
                if *unit_integral {
                    *half_width / (R::PI() * (x * x + g2))
                } else {
                    g2 / (x * x + g2)
                }
            }
            SpectralProfile::Tabulated { grid, values, .. } => {
                if omega < grid[0] || omega > grid[grid.len() - 1] {
                    return R::zero();
                }
                let idx = grid.partition_point(|&g| g < omega);
                if idx == 0 {
                    return values[0];
                }
                let (x0, x1) = (grid[idx - 1], grid[idx.min(grid.len() - 1)]);
                if x1 == x0 {
                    return values[idx - 1];
                }
                let t = (omega - x0) / (x1 - x0);
                values[idx - 1] * (R::one() - t) + values[idx.min(values.len() - 1)] * t
            }
        }
    }

    /// Integration support for a power-profile integral, given the
    /// requested half-width in Gaussian-sigma units. Lorentzians use the
    /// wider `40 half-widths per 6 sigma` convention; tabulated profiles are
    /// exactly supported on their grid.
    pub fn support(&self, sigmas: R) -> (R, R) {
        match self {
            SpectralProfile::Gaussian { center, variance, .. } => {
                let hw = sigmas * variance.sqrt();
                (*center - hw, *center + hw)
            }
            SpectralProfile::Lorentzian { center, half_width, .. } => {
                let hw = sigmas / R::from_f64_lit(6.0) * R::from_f64_lit(40.0) * *half_width;
                (*center - hw, *center + hw)
            }
            SpectralProfile::Tabulated { grid, .. } => (grid[0], grid[grid.len() - 1]),
        }
    }

    /// Support when the profile enters through its amplitude (square root),
    /// whose tails are wider than the power profile's.
    pub fn amplitude_support(&self, sigmas: R) -> (R, R) {
        match self {
            SpectralProfile::Gaussian { .. } => self.support(sigmas * R::SQRT_2()),
            _ => self.support(sigmas),
        }
    }

    /// Crude bound on the profile mass outside the truncated support,
    /// reported alongside quadrature error estimates.
    pub fn tail_mass_bound(&self, sigmas: R) -> R {
        match self {
            SpectralProfile::Gaussian { .. } => {
                (-sigmas * sigmas / R::from_f64_lit(2.0)).exp()
            }
            SpectralProfile::Lorentzian { .. } => {
                // 2 * (1/pi) arctan tail beyond 40 half-widths per 6 sigma
                let reach = sigmas / R::from_f64_lit(6.0) * R::from_f64_lit(40.0);
                R::from_f64_lit(2.0) / (R::PI() * reach)
            }
            SpectralProfile::Tabulated { .. } => R::zero(),
        }
    }
}

/// Phase-mismatch factor `phi(w1, w2)` of the joint amplitude.
#[derive(Clone)]
pub enum Mismatch<R: Real> {
    /// The constant-one default.
    Unity,
    /// sinc(scale * Delta k)-style factor or anything else user supplied.
    Custom(Arc<dyn Fn(R, R) -> R + Send + Sync>),
}

impl<R: Real> std::fmt::Debug for Mismatch<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mismatch::Unity => write!(f, "Mismatch::Unity"),
            Mismatch::Custom(_) => write!(f, "Mismatch::Custom(..)"),
        }
    }
}

impl<R: Real> Mismatch<R> {
    pub fn value(&self, w1: R, w2: R) -> R {
        match self {
            Mismatch::Unity => R::one(),
            Mismatch::Custom(f) => f(w1, w2),
        }
    }
}

/// Joint spectral amplitude
/// `Phi(w1, w2) = sqrt(F_p(w1 + w2)) * phi(w1, w2)`.
#[derive(Clone, Debug)]
pub struct JointAmplitude<R: Real> {
    pub pump: SpectralProfile<R>,
    pub mismatch: Mismatch<R>,
}

impl<R: Real> JointAmplitude<R> {
    pub fn new(pump: SpectralProfile<R>) -> Self {
        JointAmplitude { pump, mismatch: Mismatch::Unity }
    }

    pub fn with_mismatch(mut self, mismatch: Mismatch<R>) -> Self {
        self.mismatch = mismatch;
        self
    }

    /// Product-form amplitude `Phi(w1, w2) = f(w1) g(w2)` on a bounded
    /// support, for which the photon-pair exchange integral factorizes. The
    /// pump factor is a flat table (amplitude one) over the reachable sum
    /// frequencies.
    pub fn factorized(
        f: Arc<dyn Fn(R) -> R + Send + Sync>,
        g: Arc<dyn Fn(R) -> R + Send + Sync>,
        sum_support: (R, R),
    ) -> Result<Self, SpectralError> {
        let pump = SpectralProfile::tabulated(
            vec![sum_support.0, sum_support.1],
            vec![R::one(), R::one()],
            false,
        )?;
        Ok(JointAmplitude {
            pump,
            mismatch: Mismatch::Custom(Arc::new(move |w1, w2| f(w1) * g(w2))),
        })
    }

    pub fn value(&self, w1: R, w2: R) -> R {
        self.pump.value(w1 + w2).sqrt() * self.mismatch.value(w1, w2)
    }
}

/// Detection weight `|xi(w)|^2` used in all spectral integrals.
pub fn filtered_weight<R: Real>(filter: &SpectralProfile<R>, omega: R) -> R {
    filter.value(omega)
}

/// Gaussian variance from a full width at half maximum.
pub fn gaussian_variance_from_fwhm<R: Real>(fwhm: R) -> R {
    fwhm * fwhm / (R::from_f64_lit(8.0) * R::from_f64_lit(2.0).ln())
}

/// Lorentzian half-width at half-maximum from a FWHM.
pub fn lorentzian_half_width_from_fwhm<R: Real>(fwhm: R) -> R {
    fwhm / R::from_f64_lit(2.0)
}

/// Small-bandwidth conversion of a wavelength FWHM to an angular-frequency
/// FWHM: `dw = 2 pi c dl / l^2`.
pub fn angular_fwhm_from_wavelength<R: Real>(lambda_center: R, delta_lambda_fwhm: R) -> R {
    let two_pi = R::PI() + R::PI();
    two_pi * R::from_f64_lit(crate::network::LIGHT_SPEED) * delta_lambda_fwhm
        / (lambda_center * lambda_center)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peak_value() {
        let var = 2.5_f64;
        let p = SpectralProfile::gaussian(10.0, var).unwrap();
        let peak = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
        assert!((filtered_weight(&p, 10.0) - peak).abs() < 1e-15);
        assert!(filtered_weight(&p, 1e6) >= 0.0); // finite, tiny far out
        assert!(filtered_weight(&p, 1e3) < 1e-300);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let p = SpectralProfile::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0], false).unwrap();
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(1.5), 1.0);
        assert_eq!(p.value(-0.1), 0.0);
        assert_eq!(p.value(2.1), 0.0);
    }

    #[test]
    fn tabulated_normalization_is_exact_on_grid() {
        let p =
            SpectralProfile::tabulated(vec![0.0_f64, 1.0, 2.0], vec![1.0, 3.0, 1.0], true).unwrap();
        if let SpectralProfile::Tabulated { grid, values, .. } = &p {
            let mut integral = 0.0;
            for i in 1..grid.len() {
                integral += (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]) / 2.0;
            }
            assert!((integral - 1.0).abs() < 1e-9);
        } else {
            unreachable!()
        }
    }

    #[test]
    fn fwhm_conversions() {
        let var: f64 = gaussian_variance_from_fwhm(2.0);
        assert!((var - 4.0 / (8.0 * 2.0_f64.ln())).abs() < 1e-15);
        assert_eq!(lorentzian_half_width_from_fwhm(3.0), 1.5);
        // 5 nm at 790 nm
        let dw: f64 = angular_fwhm_from_wavelength(790e-9, 5e-9);
        let expected = 2.0 * std::f64::consts::PI * 299_792_458.0 * 5e-9 / 790e-9_f64.powi(2);
        assert!((dw - expected).abs() < 1e-3 * expected.abs());
    }

    #[test]
    fn joint_amplitude_evaluation_identity() {
        let pump = SpectralProfile::gaussian(4.0_f64, 1.0).unwrap();
        let jsa = JointAmplitude::new(pump.clone());
        let w1 = 1.7_f64;
        let w2 = 2.1_f64;
        assert!((jsa.value(w1, w2) - pump.value(w1 + w2).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_widths_rejected() {
        assert!(SpectralProfile::<f64>::gaussian(0.0, 0.0).is_err());
        assert!(SpectralProfile::<f64>::lorentzian(0.0, -1.0).is_err());
        assert!(SpectralProfile::<f64>::tabulated(vec![0.0], vec![1.0], false).is_err());
    }
}
