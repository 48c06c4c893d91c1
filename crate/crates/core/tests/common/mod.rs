//! Shared oracle helpers: truncated-matrix evaluation of operator
//! expressions, independent of the symbolic rewriting they are used to
//! check.

use ndarray::Array1;
use num_complex::Complex64;
use qcounter::fock::{FockBasis, LadderOp};
use qcounter::opalg::OperatorExpr;

pub const MODE_NAMES: [&str; 3] = ["a", "b", "v"];

pub fn mode_index(name: &str) -> usize {
    MODE_NAMES.iter().position(|m| *m == name).expect("discrete test mode")
}

/// Apply a (discrete-mode) operator expression to a state vector by chaining
/// sparse ladder actions; no normal ordering involved.
pub fn apply_expr(e: &OperatorExpr, basis: FockBasis, v: &Array1<Complex64>) -> Array1<Complex64> {
    let mut acc = Array1::<Complex64>::zeros(v.len());
    for term in e.terms() {
        assert!(term.deltas.is_empty() && term.kernels.is_empty() && term.zeta_power == 0);
        let mut w = v.clone();
        for factor in term.factors.iter().rev() {
            assert!(factor.mode.freq.is_none(), "matrix oracle handles discrete modes only");
            let op = LadderOp { basis, mode: mode_index(&factor.mode.name), dagger: factor.dagger };
            w = op.apply(&w);
        }
        let c = term.coeff.to_c64();
        acc = acc + w.mapv(|z| z * c);
    }
    acc
}

/// `<psi| e |psi>` on the truncated space.
pub fn vector_expectation(e: &OperatorExpr, basis: FockBasis, v: &Array1<Complex64>) -> Complex64 {
    let ev = apply_expr(e, basis, v);
    v.iter().zip(ev.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Normalized product of coherent states, one amplitude per mode.
pub fn coherent_product(basis: FockBasis, alphas: &[Complex64]) -> Array1<Complex64> {
    assert_eq!(alphas.len(), basis.modes());
    let n1 = basis.cutoff() + 1;
    let per_mode: Vec<Vec<Complex64>> = alphas
        .iter()
        .map(|alpha| {
            let mut coeffs = Vec::with_capacity(n1);
            let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            coeffs.push(c);
            for n in 1..n1 {
                c *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
                coeffs.push(c);
            }
            coeffs
        })
        .collect();
    let mut v = Array1::<Complex64>::zeros(basis.dim());
    for idx in 0..basis.dim() {
        let mut amp = Complex64::new(1.0, 0.0);
        for (mode, coeffs) in per_mode.iter().enumerate() {
            amp *= coeffs[basis.occupation(idx, mode)];
        }
        v[idx] = amp;
    }
    v
}
