//! States on the truncated basis and the channels acting on them.

use ndarray::Array1;
use num_complex::Complex;

use super::basis::FockBasis;
use super::gates::{splitter_gate, squeezer_gate, TwoModeGate};
use super::FockError;
use crate::real::Real;

/// Default bound on accumulated truncation leak before a state is flagged
/// unusable.
pub const DEFAULT_LEAK_TOL: f64 = 1e-6;

/// Numerical slack on the splitter unitarity relations.
pub const SPLITTER_TOL: f64 = 1e-12;

/// A state on a truncated Fock basis.
///
/// Stored as one or more unnormalized amplitude vectors ("branches"). A pure
/// state has a single branch; the loss channel's ancilla-and-trace
/// construction yields one branch per traced-out ancilla occupation, which
/// keeps every moment of the surviving modes exact without a density matrix.
/// The total squared norm over branches plus `truncation_leak` is one.
#[derive(Clone, Debug)]
pub struct FockState<R: Real> {
    basis: FockBasis,
    branches: Vec<Array1<Complex<R>>>,
    leak: R,
    leak_tol: R,
}

impl<R: Real> FockState<R> {
    /// All modes in the vacuum.
    pub fn vacuum(basis: FockBasis) -> Self {
        let mut amps = Array1::zeros(basis.dim());
        amps[0] = Complex::new(R::one(), R::zero());
        FockState {
            basis,
            branches: vec![amps],
            leak: R::zero(),
            leak_tol: R::from_f64_lit(DEFAULT_LEAK_TOL),
        }
    }

    /// Coherent state of amplitude `alpha` in `mode`, vacuum elsewhere.
    /// Requires `|alpha|^2 <= cutoff / 4` so the Poisson tail beyond the
    /// cutoff stays within the leak tolerance.
    pub fn coherent(basis: FockBasis, mode: usize, alpha: Complex<R>) -> Result<Self, FockError> {
        basis.check_mode(mode)?;
        let nbar = alpha.norm_sqr();
        let max_nbar = R::from_usize(basis.cutoff()).unwrap() / R::from_f64_lit(4.0);
        if nbar > max_nbar {
            return Err(FockError::AmplitudeTooLarge {
                nbar: nbar.to_f64().unwrap_or(f64::NAN),
                cutoff: basis.cutoff(),
            });
        }
        let mut state = FockState::vacuum(basis);
        let stride = basis.stride(mode);
        let prefactor = (-nbar / (R::one() + R::one())).exp();
        let mut coeff = Complex::new(prefactor, R::zero());
        let mut norm_in = coeff.norm_sqr();
        state.branches[0][0] = coeff;
        for n in 1..=basis.cutoff() {
            coeff = coeff * alpha / Complex::new(R::from_usize(n).unwrap().sqrt(), R::zero());
            state.branches[0][n * stride] = coeff;
            norm_in += coeff.norm_sqr();
        }
        state.leak = (R::one() - norm_in).max(R::zero());
        state.check_leak()?;
        Ok(state)
    }

    /// Build a pure state from explicit amplitudes (primarily for tests);
    /// the deficit from unit norm is recorded as leak.
    pub fn from_pure(basis: FockBasis, amplitudes: Vec<Complex<R>>) -> Result<Self, FockError> {
        if amplitudes.len() != basis.dim() {
            return Err(FockError::BasisMismatch);
        }
        let amps = Array1::from_vec(amplitudes);
        let norm: R = amps.iter().map(|z| z.norm_sqr()).sum();
        if norm > R::one() + R::from_f64_lit(1e-9) {
            return Err(FockError::NotNormalized { norm: norm.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(FockState {
            basis,
            branches: vec![amps],
            leak: (R::one() - norm).max(R::zero()),
            leak_tol: R::from_f64_lit(DEFAULT_LEAK_TOL),
        })
    }

    pub fn with_leak_tolerance(mut self, tol: R) -> Self {
        self.leak_tol = tol;
        self
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn truncation_leak(&self) -> R {
        self.leak
    }

    /// Squared norm summed over branches; equals `1 - truncation_leak` up to
    /// roundoff.
    pub fn norm_sq(&self) -> R {
        self.branches
            .iter()
            .map(|b| b.iter().map(|z| z.norm_sqr()).sum::<R>())
            .sum()
    }

    pub fn is_usable(&self) -> bool {
        self.leak <= self.leak_tol
    }

    fn check_leak(&self) -> Result<(), FockError> {
        if self.is_usable() {
            Ok(())
        } else {
            Err(FockError::TruncationLeak {
                leak: self.leak.to_f64().unwrap_or(f64::NAN),
                tol: self.leak_tol.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    fn apply_gate(&self, gate: &TwoModeGate<R>, m1: usize, m2: usize) -> Self {
        let mut out = self.clone();
        let mut leak_gain = R::zero();
        out.branches = self
            .branches
            .iter()
            .map(|b| {
                let (applied, leak) = gate.apply(&self.basis, b, m1, m2);
                leak_gain += leak;
                applied
            })
            .collect();
        out.leak = self.leak + leak_gain;
        out
    }

    /// Two-mode squeezing `exp(zeta* a b - zeta a'b')` on `(mode_a, mode_b)`.
    pub fn apply_two_mode_squeezer(
        &self,
        mode_a: usize,
        mode_b: usize,
        zeta: Complex<R>,
    ) -> Result<Self, FockError> {
        self.basis.check_mode(mode_a)?;
        self.basis.check_mode(mode_b)?;
        if mode_a == mode_b {
            return Err(FockError::IdenticalModes(mode_a));
        }
        if zeta.norm_sqr() == R::zero() {
            return Ok(self.clone());
        }
        let gate = squeezer_gate(self.basis.cutoff(), zeta);
        let out = self.apply_gate(&gate, mode_a, mode_b);
        out.check_leak()?;
        Ok(out)
    }

    /// Passive beam splitter sending annihilators `(b, v)` to
    /// `(T b + R v, R b + T v)`. `(T, R)` must satisfy the lossless
    /// relations `|T|^2 + |R|^2 = 1` and `TR* = -RT*`.
    pub fn apply_beam_splitter(
        &self,
        m1: usize,
        m2: usize,
        t: Complex<R>,
        r: Complex<R>,
    ) -> Result<Self, FockError> {
        self.basis.check_mode(m1)?;
        self.basis.check_mode(m2)?;
        if m1 == m2 {
            return Err(FockError::IdenticalModes(m1));
        }
        validate_splitter(t, r)?;
        let gate = splitter_gate(self.basis.cutoff(), t, r);
        let out = self.apply_gate(&gate, m1, m2);
        out.check_leak()?;
        Ok(out)
    }

    /// Photon loss of transmissivity `eta` on one mode: couple to a fresh
    /// vacuum ancilla through a `(sqrt(eta), i sqrt(1-eta))` splitter and
    /// trace the ancilla out. The trace is exact: each surviving ancilla
    /// occupation becomes its own branch.
    pub fn apply_loss(&self, mode: usize, eta: R) -> Result<Self, FockError> {
        self.basis.check_mode(mode)?;
        if eta < R::zero() || eta > R::one() {
            return Err(FockError::EtaOutOfRange(eta.to_f64().unwrap_or(f64::NAN)));
        }
        if eta == R::one() {
            return Ok(self.clone());
        }
        let extended = self.basis.extended()?;
        let ancilla = self.basis.modes();
        let t = Complex::new(eta.sqrt(), R::zero());
        let r = Complex::new(R::zero(), (R::one() - eta).sqrt());
        let gate = splitter_gate(self.basis.cutoff(), t, r);

        let dim = self.basis.dim();
        let anc_stride = extended.stride(ancilla);
        let mut branches = Vec::new();
        for branch in &self.branches {
            // Embed with the ancilla in vacuum, scatter, then slice by
            // ancilla occupation. Total photon number <= 2 * cutoff keeps
            // every splitter output inside the extended box: no new leak.
            let mut big = Array1::<Complex<R>>::zeros(extended.dim());
            big.slice_mut(ndarray::s![0..dim]).assign(branch);
            let (scattered, gate_leak) = gate.apply(&extended, &big, mode, ancilla);
            debug_assert!(gate_leak == R::zero());
            for k in 0..=self.basis.cutoff() {
                let slice = scattered.slice(ndarray::s![k * anc_stride..k * anc_stride + dim]);
                let norm: R = slice.iter().map(|z| z.norm_sqr()).sum();
                if norm > R::zero() {
                    branches.push(slice.to_owned());
                }
            }
        }
        Ok(FockState {
            basis: self.basis,
            branches,
            leak: self.leak,
            leak_tol: self.leak_tol,
        })
    }

    /// Exact expectation of an ordered ladder-operator product; entries are
    /// `(mode, dagger)` read left to right.
    pub fn moment(&self, ops: &[(usize, bool)]) -> Result<Complex<R>, FockError> {
        for &(mode, _) in ops {
            self.basis.check_mode(mode)?;
        }
        let mut acc = Complex::new(R::zero(), R::zero());
        for branch in &self.branches {
            let mut v = branch.clone();
            for &(mode, dagger) in ops.iter().rev() {
                v = super::ladder::apply_ladder(&self.basis, &v, mode, dagger);
            }
            for (x, y) in branch.iter().zip(v.iter()) {
                acc += x.conj() * *y;
            }
        }
        Ok(acc)
    }

    /// Mean photon number of one mode.
    pub fn mean_photon(&self, mode: usize) -> Result<R, FockError> {
        Ok(self.moment(&[(mode, true), (mode, false)])?.re)
    }

    /// Joint photon-number distribution over the listed modes, marginalized
    /// over the rest. Index layout is little-endian in the given mode order.
    pub fn number_distribution(&self, modes: &[usize]) -> Result<Vec<R>, FockError> {
        for &m in modes {
            self.basis.check_mode(m)?;
        }
        let n1 = self.basis.cutoff() + 1;
        let mut probs = vec![R::zero(); n1.pow(modes.len() as u32)];
        for branch in &self.branches {
            for (idx, z) in branch.iter().enumerate() {
                let p = z.norm_sqr();
                if p > R::zero() {
                    let mut slot = 0;
                    for (pos, &m) in modes.iter().enumerate() {
                        slot += self.basis.occupation(idx, m) * n1.pow(pos as u32);
                    }
                    probs[slot] += p;
                }
            }
        }
        Ok(probs)
    }
}

pub(crate) fn validate_splitter<R: Real>(t: Complex<R>, r: Complex<R>) -> Result<(), FockError> {
    let tol = R::from_f64_lit(SPLITTER_TOL);
    let unit = (t.norm_sqr() + r.norm_sqr() - R::one()).abs();
    let cross = t * r.conj() + r * t.conj();
    if unit > tol || cross.norm() > tol {
        return Err(FockError::NonUnitarySplitter {
            unit_defect: unit.to_f64().unwrap_or(f64::NAN),
            cross_defect: cross.norm().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
