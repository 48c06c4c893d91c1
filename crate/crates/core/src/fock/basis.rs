//! Truncated multi-mode Fock basis indexing.

use serde::{Deserialize, Serialize};

use super::FockError;

/// Hard cap on the amplitude vector length.
pub const DEFAULT_DIM_LIMIT: usize = 10_000_000;

/// A product basis of `modes` oscillators, each truncated at `cutoff`
/// photons. Basis states are indexed little-endian: occupation of mode `k`
/// changes the index in strides of `(cutoff + 1)^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self, FockError> {
        Self::with_dim_limit(modes, cutoff, DEFAULT_DIM_LIMIT)
    }

    pub fn with_dim_limit(modes: usize, cutoff: usize, limit: usize) -> Result<Self, FockError> {
        if modes == 0 {
            return Err(FockError::EmptyBasis);
        }
        let dim = (cutoff as u128 + 1).checked_pow(modes as u32).unwrap_or(u128::MAX);
        if dim > limit as u128 {
            return Err(FockError::DimensionLimit { dim, limit });
        }
        Ok(FockBasis { modes, cutoff })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1).pow(self.modes as u32)
    }

    pub fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow(mode as u32)
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        index / self.stride(mode) % (self.cutoff + 1)
    }

    pub fn check_mode(&self, mode: usize) -> Result<(), FockError> {
        if mode < self.modes {
            Ok(())
        } else {
            Err(FockError::ModeOutOfRange { mode, modes: self.modes })
        }
    }

    /// Same cutoff with one extra mode appended (used for loss ancillas).
    pub(crate) fn extended(&self) -> Result<FockBasis, FockError> {
        FockBasis::with_dim_limit(self.modes + 1, self.cutoff, DEFAULT_DIM_LIMIT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let b = FockBasis::new(3, 4).unwrap();
        assert_eq!(b.dim(), 125);
        let idx = 2 * b.stride(0) + 3 * b.stride(1) + b.stride(2);
        assert_eq!(b.occupation(idx, 0), 2);
        assert_eq!(b.occupation(idx, 1), 3);
        assert_eq!(b.occupation(idx, 2), 1);
    }

    #[test]
    fn dimension_limit_enforced() {
        assert!(matches!(
            FockBasis::new(8, 24),
            Err(FockError::DimensionLimit { .. })
        ));
        assert!(FockBasis::new(4, 12).is_ok());
    }
}
