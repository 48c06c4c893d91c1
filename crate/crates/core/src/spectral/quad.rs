//! Gauss–Legendre quadrature machinery for the spectral integrals.

use serde::{Deserialize, Serialize};

use super::profile::SpectralProfile;
use super::SpectralError;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// Fixed-order tensor rule with a lower-order error estimate.
    TensorGaussLegendre,
    /// Refine the order until the estimate meets the target tolerance.
    Adaptive,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadratureSpec<R: Real> {
    pub rule: QuadratureRule,
    /// Support half-width in Gaussian-sigma units.
    pub support_sigmas: R,
    pub points_per_axis: usize,
    pub target_abs_tol: R,
}

impl<R: Real> Default for QuadratureSpec<R> {
    fn default() -> Self {
        QuadratureSpec {
            rule: QuadratureRule::TensorGaussLegendre,
            support_sigmas: R::from_f64_lit(6.0),
            points_per_axis: 96,
            target_abs_tol: R::from_f64_lit(1e-8),
        }
    }
}

impl<R: Real> QuadratureSpec<R> {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.points_per_axis < 8 {
            return Err(SpectralError::TooFewPoints(self.points_per_axis));
        }
        if self.support_sigmas <= R::zero() || self.target_abs_tol <= R::zero() {
            return Err(SpectralError::BadQuadratureSpec);
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = R::from_usize(n).unwrap();
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess
        let k = R::from_usize(i).unwrap();
        let quarter = R::from_f64_lit(0.25);
        let mut x = (R::PI() * (k + R::from_f64_lit(0.75)) / (nf + quarter)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < R::epsilon() * R::from_f64_lit(4.0) {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = R::from_f64_lit(2.0) / ((R::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_pair<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = R::from_usize(k).unwrap();
        let two = R::from_f64_lit(2.0);
        let p2 = ((two * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = nf_derivative(n, x, p0, p1);
    (p1, dp)
}

fn nf_derivative<R: Real>(n: usize, x: R, p_nm1: R, p_n: R) -> R {
    let nf = R::from_usize(n).unwrap();
    nf * (x * p_n - p_nm1) / (x * x - R::one())
}

/// One-dimensional nodes and weights adapted to a profile: an affine map of
/// the Gauss–Legendre rule over the profile support, except Lorentzians,
/// which use the tangent substitution so the peak is resolved even when the
/// support spans many half-widths.
pub fn profile_nodes<R: Real>(
    profile: &SpectralProfile<R>,
    n: usize,
    sigmas: R,
    amplitude: bool,
) -> (Vec<R>, Vec<R>) {
    let (base_nodes, base_weights) = gauss_legendre::<R>(n);
    match profile {
        SpectralProfile::Lorentzian { center, half_width, .. } => {
            let (lo, hi) = profile.support(sigmas);
            let u_hi = ((hi - *center) / *half_width).atan();
            let u_lo = ((lo - *center) / *half_width).atan();
            let mid = (u_hi + u_lo) / R::from_f64_lit(2.0);
            let half = (u_hi - u_lo) / R::from_f64_lit(2.0);
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for (x, w) in base_nodes.iter().zip(&base_weights) {
                let u = mid + half * *x;
                let cos_u = u.cos();
                nodes.push(*center + *half_width * u.tan());
                weights.push(*w * half * *half_width / (cos_u * cos_u));
            }
            (nodes, weights)
        }
        _ => {
            let (lo, hi) = if amplitude {
                profile.amplitude_support(sigmas)
            } else {
                profile.support(sigmas)
            };
            let mid = (hi + lo) / R::from_f64_lit(2.0);
            let half = (hi - lo) / R::from_f64_lit(2.0);
            let nodes = base_nodes.iter().map(|x| mid + half * *x).collect();
            let weights = base_weights.iter().map(|w| *w * half).collect();
            (nodes, weights)
        }
    }
}

/// Affine map of the base rule onto `[lo, hi]`.
pub fn interval_nodes<R: Real>(n: usize, lo: R, hi: R) -> (Vec<R>, Vec<R>) {
    let (base_nodes, base_weights) = gauss_legendre::<R>(n);
    let mid = (hi + lo) / R::from_f64_lit(2.0);
    let half = (hi - lo) / R::from_f64_lit(2.0);
    (
        base_nodes.iter().map(|x| mid + half * *x).collect(),
        base_weights.iter().map(|w| *w * half).collect(),
    )
}
