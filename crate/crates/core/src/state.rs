use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::FockTruncation;

/// Normalization tolerance accepted by operations that require a unit vector.
pub const NORM_TOL: f64 = 1e-10;

/// Pure state on the truncated `|n n'>` basis.
///
/// `amps[[n, n']]` is the amplitude of `|n n'>`; the row-major flattening
/// matches [`FockTruncation::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    amps: Array2<C64>,
    trunc: FockTruncation,
}

impl TwoModeState {
    pub fn vacuum(trunc: FockTruncation) -> Self {
        let mut amps = Array2::zeros((trunc.levels_a(), trunc.levels_b()));
        amps[[0, 0]] = C64::new(1.0, 0.0);
        TwoModeState { amps, trunc }
    }

    /// Builds a state from raw amplitudes and rescales it to unit norm.
    pub fn from_amplitudes(amps: Array2<C64>, trunc: FockTruncation) -> Result<Self> {
        let shape = (trunc.levels_a(), trunc.levels_b());
        if amps.dim() != shape {
            return Err(Error::DimensionMismatch {
                expected: trunc.dim(),
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::EmptySpec);
        }
        let amps = amps.as_standard_layout().mapv(|c| c / norm);
        Ok(TwoModeState { amps, trunc })
    }

    /// Wraps amplitudes that are already normalized; no rescaling happens.
    pub(crate) fn from_raw(amps: Array2<C64>, trunc: FockTruncation) -> Self {
        debug_assert_eq!(amps.dim(), (trunc.levels_a(), trunc.levels_b()));
        TwoModeState {
            amps: amps.as_standard_layout().into_owned(),
            trunc,
        }
    }

    pub fn trunc(&self) -> FockTruncation {
        self.trunc
    }

    pub fn amps(&self) -> &Array2<C64> {
        &self.amps
    }

    pub fn amp(&self, n: usize, n_prime: usize) -> C64 {
        self.amps[[n, n_prime]]
    }

    /// Amplitudes as a flat vector in basis-index order.
    pub fn as_slice(&self) -> &[C64] {
        self.amps.as_slice().expect("standard layout")
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &TwoModeState) -> Result<C64> {
        if self.trunc != other.trunc {
            return Err(Error::DimensionMismatch {
                expected: self.trunc.dim(),
                got: other.trunc.dim(),
            });
        }
        Ok(self
            .as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(l, r)| l.conj() * r)
            .sum())
    }

    /// Highest mode-a level carrying amplitude above `tol`.
    pub fn top_level_a(&self, tol: f64) -> usize {
        self.amps
            .outer_iter()
            .enumerate()
            .filter(|(_, row)| row.iter().any(|c| c.norm() > tol))
            .map(|(n, _)| n)
            .last()
            .unwrap_or(0)
    }

    /// Highest mode-b level carrying amplitude above `tol`.
    pub fn top_level_b(&self, tol: f64) -> usize {
        self.amps
            .columns()
            .into_iter()
            .enumerate()
            .filter(|(_, col)| col.iter().any(|c| c.norm() > tol))
            .map(|(n, _)| n)
            .next_back()
            .unwrap_or(0)
    }
}
