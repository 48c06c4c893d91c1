//! Ladder operators on the truncated basis.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use super::basis::FockBasis;
use crate::real::Real;

/// Annihilation or creation operator on one mode. The action is sparse:
/// each basis state maps to at most one other. Creation out of the top
/// level `n = cutoff` is dropped, so `a a' - a'a = 1` holds exactly only on
/// the sub-block with `n < cutoff`.
#[derive(Clone, Copy, Debug)]
pub struct LadderOp {
    pub basis: FockBasis,
    pub mode: usize,
    pub dagger: bool,
}

impl LadderOp {
    pub fn annihilate(basis: FockBasis, mode: usize) -> Self {
        LadderOp { basis, mode, dagger: false }
    }

    pub fn create(basis: FockBasis, mode: usize) -> Self {
        LadderOp { basis, mode, dagger: true }
    }

    pub fn apply<R: Real>(&self, v: &Array1<Complex<R>>) -> Array1<Complex<R>> {
        apply_ladder(&self.basis, v, self.mode, self.dagger)
    }

    /// Dense matrix form, mostly for small-space oracle checks.
    pub fn to_dense<R: Real>(&self) -> Array2<Complex<R>> {
        let dim = self.basis.dim();
        let mut m = Array2::zeros((dim, dim));
        for col in 0..dim {
            let mut unit = Array1::zeros(dim);
            unit[col] = Complex::new(R::one(), R::zero());
            let out = self.apply(&unit);
            for row in 0..dim {
                if out[row].norm_sqr() > R::zero() {
                    m[(row, col)] = out[row];
                }
            }
        }
        m
    }
}

pub(crate) fn apply_ladder<R: Real>(
    basis: &FockBasis,
    v: &Array1<Complex<R>>,
    mode: usize,
    dagger: bool,
) -> Array1<Complex<R>> {
    let stride = basis.stride(mode);
    let cutoff = basis.cutoff();
    let mut out = Array1::zeros(v.len());
    for (idx, z) in v.iter().enumerate() {
        if z.norm_sqr() == R::zero() {
            continue;
        }
        let n = basis.occupation(idx, mode);
        if dagger {
            if n < cutoff {
                let root = R::from_usize(n + 1).unwrap().sqrt();
                out[idx + stride] += *z * Complex::new(root, R::zero());
            }
        } else if n > 0 {
            let root = R::from_usize(n).unwrap().sqrt();
            out[idx - stride] += *z * Complex::new(root, R::zero());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn commutator_is_identity_below_cutoff() {
        let basis = FockBasis::new(1, 6).unwrap();
        let a = LadderOp::annihilate(basis, 0).to_dense::<f64>();
        let adag = LadderOp::create(basis, 0).to_dense::<f64>();
        let comm = a.dot(&adag) - adag.dot(&a);
        for n in 0..basis.dim() {
            for m in 0..basis.dim() {
                let expected = if n == m && n < basis.cutoff() { 1.0 } else { 0.0 };
                // the (cutoff, cutoff) entry is -cutoff: truncation artifact
                if n == basis.cutoff() && m == basis.cutoff() {
                    continue;
                }
                assert!((comm[(n, m)] - Complex64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }
}
