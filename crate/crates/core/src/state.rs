//! Complex amplitude vectors over a sector basis.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitudes over a fixed sector basis, one entry per basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amp: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amp: Vec<Complex64>) -> Self {
        Self { amp }
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); dim];
        amp[index] = Complex64::new(1.0, 0.0);
        Self { amp }
    }

    /// Equal-amplitude superposition of every basis state.
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amp: vec![a; dim] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            amp: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for z in &mut self.amp {
                *z /= n;
            }
        }
    }

    /// Inner product `⟨self|other⟩` (conjugate-linear in `self`).
    pub fn dot(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability weights `|ψ_s|²` per basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amp.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Expectation of an observable that is diagonal in the sector basis.
    pub fn expect_diagonal(&self, diag: &[f64]) -> f64 {
        debug_assert_eq!(diag.len(), self.amp.len());
        self.amp
            .iter()
            .zip(diag)
            .map(|(z, d)| z.norm_sqr() * d)
            .sum()
    }
}
