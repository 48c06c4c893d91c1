//! The photon-pair indistinguishability factor gamma: closed form for
//! Gaussian filter and pump, the reduced two-dimensional integral, and the
//! general fourfold integral for arbitrary profiles and joint amplitudes.

use serde::{Deserialize, Serialize};

use super::profile::{JointAmplitude, SpectralProfile};
use super::quad::{profile_nodes, QuadratureRule, QuadratureSpec};
use super::SpectralError;
use crate::real::Real;

/// Upper slack on the `gamma <= 1` bound before a result is rejected as a
/// quadrature failure.
pub const GAMMA_UPPER_SLACK: f64 = 1e-6;

/// Intermediates of the Gaussian square-completion reduction, kept for
/// audit: `1/G^2 = 1/DF^2 + 1/(2 Dp^2)` and `1/G'^2 = 1/G^2 - G^2/(4 Dp^4)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GammaIntermediates<R: Real> {
    pub cap_gamma_sq: R,
    pub cap_gamma_prime_sq: R,
}

/// Result of a gamma evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaResult<R: Real> {
    pub gamma_numeric: R,
    /// Closed-form value when the inputs admit one (Gaussian/Gaussian).
    pub gamma_closed: Option<R>,
    /// Difference between successive quadrature orders.
    pub abs_error_estimate: R,
    /// Bound on the profile mass outside the truncated support.
    pub tail_bound: R,
    pub intermediates: Option<GammaIntermediates<R>>,
    /// Diagonal spectral integral `I_diag = int |xi|^2 |Phi|^2`.
    pub i_diag: Option<R>,
    /// Fourfold exchange integral (the gamma numerator).
    pub i_cross: Option<R>,
}

/// Closed-form gamma for Gaussian filter (power variance `delta_f2`) and
/// Gaussian pump (power variance `delta_p2`):
/// `gamma = 1 / sqrt(1 + delta_f2 / delta_p2)`.
pub fn gamma_closed_form<R: Real>(
    delta_f2: R,
    delta_p2: R,
) -> Result<(R, GammaIntermediates<R>), SpectralError> {
    if delta_f2 <= R::zero() || delta_p2 <= R::zero() {
        return Err(SpectralError::NonPositiveWidth);
    }
    let gamma = R::one() / (R::one() + delta_f2 / delta_p2).sqrt();
    let two = R::from_f64_lit(2.0);
    let four = R::from_f64_lit(4.0);
    let cap_gamma_sq = R::one() / (R::one() / delta_f2 + R::one() / (two * delta_p2));
    let cap_gamma_prime_sq = R::one()
        / (R::one() / cap_gamma_sq - cap_gamma_sq / (four * delta_p2 * delta_p2));
    Ok((gamma, GammaIntermediates { cap_gamma_sq, cap_gamma_prime_sq }))
}

/// The reduced two-dimensional Gaussian integral for gamma, after the inner
/// pair frequencies are integrated out by square completion (filter center
/// shifted to zero):
///
/// ```text
/// gamma = 1/(2 pi DF^2) int dw dw'' exp(-w^2/(2 DF^2)) exp(-w''^2/(2 DF^2))
///                                   exp(-(w - w'')^2 / (4 Dp^2))
/// ```
pub fn gamma_reduced_2d<R: Real>(
    filter: &SpectralProfile<R>,
    pump: &SpectralProfile<R>,
    quad: &QuadratureSpec<R>,
) -> Result<GammaResult<R>, SpectralError> {
    quad.validate()?;
    let (delta_f2, delta_p2) = match (filter.variance(), pump.variance()) {
        (Some(f), Some(p)) => (f, p),
        _ => return Err(SpectralError::GaussianRequired),
    };
    let (closed, intermediates) = gamma_closed_form(delta_f2, delta_p2)?;

    let eval = |n: usize| -> R {
        let (x, w) = super::quad::interval_nodes(
            n,
            -quad.support_sigmas * delta_f2.sqrt(),
            quad.support_sigmas * delta_f2.sqrt(),
        );
        let two = R::from_f64_lit(2.0);
        let four = R::from_f64_lit(4.0);
        let mut sum = R::zero();
        for (i, wi) in x.iter().zip(&w) {
            let fi = (-*i * *i / (two * delta_f2)).exp();
            let mut row = R::zero();
            for (j, wj) in x.iter().zip(&w) {
                let fj = (-*j * *j / (two * delta_f2)).exp();
                let cross = (-(*i - *j) * (*i - *j) / (four * delta_p2)).exp();
                row += *wj * fj * cross;
            }
            sum += *wi * fi * row;
        }
        sum / (two * R::PI() * delta_f2)
    };

    let (value, estimate) = converge(quad, eval)?;
    let tail = filter.tail_mass_bound(quad.support_sigmas);
    check_gamma_range(value)?;
    Ok(GammaResult {
        gamma_numeric: value,
        gamma_closed: Some(closed),
        abs_error_estimate: estimate,
        tail_bound: tail,
        intermediates: Some(intermediates),
        i_diag: None,
        i_cross: None,
    })
}

/// General gamma as the ratio of the fourfold exchange integral to the
/// squared diagonal integral:
///
/// ```text
/// gamma = int dw dw'' dw1 dw1'' |xi(w)|^2 |xi(w'')|^2
///             Phi*(w1, w) Phi*(w1'', w'') Phi(w1, w'') Phi(w1'', w)
///       / ( int dw dw1 |xi(w)|^2 |Phi(w1, w)|^2 )^2
/// ```
///
/// Evaluated as a tensor Gauss rule, grouping the `w1` sums into the pair
/// overlap `C(w, w'') = int dw1 Phi(w1, w) Phi(w1, w'')`, which is the same
/// summation reorganized.
pub fn gamma_general_4d<R: Real>(
    filter: &SpectralProfile<R>,
    jsa: &JointAmplitude<R>,
    quad: &QuadratureSpec<R>,
) -> Result<GammaResult<R>, SpectralError> {
    quad.validate()?;

    let eval = |n: usize| -> (R, R, R) {
        let (wx, ww) = profile_nodes(filter, n, quad.support_sigmas, false);
        // Pair-frequency axis: the sum frequency lives on the pump support,
        // so w1 ranges over (pump amplitude support) - (filter support).
        let (p_lo, p_hi) = jsa.pump.amplitude_support(quad.support_sigmas);
        let (f_lo, f_hi) = filter.support(quad.support_sigmas);
        let (x1, w1) = super::quad::interval_nodes(n, p_lo - f_hi, p_hi - f_lo);

        let weight: Vec<R> = wx.iter().zip(&ww).map(|(x, w)| *w * filter.value(*x)).collect();

        // C[i][j] = sum_k w1_k Phi(x_k, wx_i) Phi(x_k, wx_j)
        let phi: Vec<Vec<R>> = wx
            .iter()
            .map(|&wi| x1.iter().map(|&xk| jsa.value(xk, wi)).collect())
            .collect();
        let mut c = vec![vec![R::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut acc = R::zero();
                for k in 0..n {
                    acc += w1[k] * phi[i][k] * phi[j][k];
                }
                c[i][j] = acc;
                c[j][i] = acc;
            }
        }

        let mut i_diag = R::zero();
        for i in 0..n {
            i_diag += weight[i] * c[i][i];
        }
        let mut numerator = R::zero();
        for i in 0..n {
            let mut row = R::zero();
            for j in 0..n {
                row += weight[j] * c[i][j] * c[i][j];
            }
            numerator += weight[i] * row;
        }
        (numerator / (i_diag * i_diag), i_diag, numerator)
    };

    let closed = match (filter.variance(), jsa.pump.variance(), &jsa.mismatch) {
        (Some(f), Some(p), super::profile::Mismatch::Unity) => {
            Some(gamma_closed_form(f, p)?.0)
        }
        _ => None,
    };

    let (result, estimate) = converge3(quad, eval)?;
    let (value, i_diag, i_cross) = result;
    if i_cross < -R::from_f64_lit(1e-9) * i_diag * i_diag {
        return Err(SpectralError::NegativeNumerator);
    }
    check_gamma_range(value)?;
    let tail = filter
        .tail_mass_bound(quad.support_sigmas)
        .max(jsa.pump.tail_mass_bound(quad.support_sigmas));
    Ok(GammaResult {
        gamma_numeric: value,
        gamma_closed: closed,
        abs_error_estimate: estimate,
        tail_bound: tail,
        intermediates: None,
        i_diag: Some(i_diag),
        i_cross: Some(i_cross),
    })
}

/// Overall indistinguishability after the experimental chain: the spectral
/// gamma, a filter-shape/pump-broadening correction, and the spatial
/// (fiber-coupling) factor, each in `(0, 1]`.
pub fn gamma_experiment_chain<R: Real>(
    gamma_spectral: R,
    shape_correction: R,
    spatial_coupling: R,
) -> Result<R, SpectralError> {
    for v in [gamma_spectral, shape_correction, spatial_coupling] {
        if v <= R::zero() || v > R::one() {
            return Err(SpectralError::FactorOutOfRange(v.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(gamma_spectral * shape_correction * spatial_coupling)
}

fn check_gamma_range<R: Real>(value: R) -> Result<(), SpectralError> {
    if value < -R::from_f64_lit(GAMMA_UPPER_SLACK)
        || value > R::one() + R::from_f64_lit(GAMMA_UPPER_SLACK)
    {
        return Err(SpectralError::GammaOutOfRange(value.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Run the scalar evaluation at increasing order until the successive
/// difference meets the tolerance (adaptive) or once with a lower-order
/// estimate (fixed tensor rule).
fn converge<R: Real, F: Fn(usize) -> R>(
    quad: &QuadratureSpec<R>,
    eval: F,
) -> Result<(R, R), SpectralError> {
    let wrapped = |n: usize| (eval(n), R::zero(), R::zero());
    let (triple, est) = converge3(quad, wrapped)?;
    Ok((triple.0, est))
}

fn converge3<R: Real, F: Fn(usize) -> (R, R, R)>(
    quad: &QuadratureSpec<R>,
    eval: F,
) -> Result<((R, R, R), R), SpectralError> {
    let n = quad.points_per_axis;
    match quad.rule {
        QuadratureRule::TensorGaussLegendre => {
            let coarse = eval(n * 3 / 4);
            let fine = eval(n);
            let estimate = (fine.0 - coarse.0).abs();
            if estimate > quad.target_abs_tol {
                return Err(SpectralError::NonConvergence {
                    estimate: estimate.to_f64().unwrap_or(f64::NAN),
                    tol: quad.target_abs_tol.to_f64().unwrap_or(f64::NAN),
                });
            }
            Ok((fine, estimate))
        }
        QuadratureRule::Adaptive => {
            let mut order = n;
            let mut prev = eval(order);
            for _ in 0..4 {
                let next_order = order * 3 / 2;
                let next = eval(next_order);
                let estimate = (next.0 - prev.0).abs();
                if estimate <= quad.target_abs_tol {
                    return Ok((next, estimate));
                }
                order = next_order;
                prev = next;
            }
            Err(SpectralError::NonConvergence {
                estimate: f64::NAN,
                tol: quad.target_abs_tol.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}
