//! Reduced density matrices and entanglement entropy over constrained-basis
//! bipartitions. Basis states are bit masks (site occupations for the gas,
//! link occupations for dimers), so a bipartition is a mask over bit
//! positions and the reduced state groups amplitudes by sub-pattern.

use std::collections::{BTreeMap, HashMap};

use faer::c64;
use faer::prelude::*;
use num_complex::Complex64;

use crate::state::StateVector;

/// Eigenvalues of a reduced density matrix below this floor contribute
/// nothing to the entropy.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

/// Split of the bit positions into a region and its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    /// Bits belonging to region A.
    pub a_mask: u128,
    /// All bits carried by the basis states.
    pub full_mask: u128,
}

impl Bipartition {
    pub fn new(a_mask: u128, full_mask: u128) -> Self {
        assert!(a_mask & !full_mask == 0, "region exceeds the basis bits");
        assert!(a_mask != 0 && a_mask != full_mask, "both parts must be nonempty");
        Self { a_mask, full_mask }
    }

    /// Contiguous circular window of `len` sites starting at `start` on an
    /// `l`-site ring.
    pub fn from_window(l: usize, start: usize, len: usize) -> Self {
        let mut a = 0u128;
        for k in 0..len {
            a |= 1u128 << ((start + k) % l);
        }
        Self::new(a, (1u128 << l) - 1)
    }

    pub fn b_mask(&self) -> u128 {
        self.full_mask & !self.a_mask
    }

    pub fn complement(&self) -> Self {
        Self {
            a_mask: self.b_mask(),
            full_mask: self.full_mask,
        }
    }
}

/// Reduced density matrix over the region-A sub-patterns that actually occur
/// in the basis.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    /// Distinct A-patterns, ascending; row/column k corresponds to pattern k.
    pub a_patterns: Vec<u128>,
    pub matrix: Mat<c64>,
}

/// ρ_A[a, a′] = Σ_b ψ*(a′, b) ψ(a, b), grouping basis states by their
/// B-side pattern.
pub fn reduced_density_matrix(
    psi: &StateVector,
    masks: &[u128],
    part: &Bipartition,
) -> ReducedDensityMatrix {
    assert_eq!(psi.dim(), masks.len());
    let b_mask = part.b_mask();

    let mut a_patterns: Vec<u128> = masks.iter().map(|m| m & part.a_mask).collect();
    a_patterns.sort_unstable();
    a_patterns.dedup();
    let a_index: HashMap<u128, usize> = a_patterns
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();

    // Bucket (a_index, amplitude) pairs by B-pattern; the ordered map keeps
    // the accumulation order, and with it the output bytes, deterministic.
    let mut buckets: BTreeMap<u128, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (k, &m) in masks.iter().enumerate() {
        let a = a_index[&(m & part.a_mask)];
        buckets.entry(m & b_mask).or_default().push((a, psi.amp[k]));
    }

    let na = a_patterns.len();
    let mut rho = Mat::<c64>::zeros(na, na);
    for group in buckets.values() {
        for &(a, za) in group {
            for &(ap, zap) in group {
                let v = za * zap.conj();
                let cur = rho[(a, ap)];
                rho[(a, ap)] = c64::new(cur.re + v.re, cur.im + v.im);
            }
        }
    }
    ReducedDensityMatrix {
        a_patterns,
        matrix: rho,
    }
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.a_patterns.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let evd = self
            .matrix
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("hermitian eigendecomposition of a density matrix");
        let s = evd.S();
        let mut vals: Vec<f64> = (0..self.dim()).map(|i| s[i].re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }
}

/// Von Neumann entropy `S = -Tr ρ_A ln ρ_A` of the reduced state, with
/// eigenvalues below the floor contributing zero.
pub fn entanglement_entropy(psi: &StateVector, masks: &[u128], part: &Bipartition) -> f64 {
    let rdm = reduced_density_matrix(psi, masks, part);
    let s: f64 = rdm
        .eigenvalues()
        .into_iter()
        .filter(|&p| p > ENTROPY_EIGENVALUE_FLOOR)
        .map(|p| -p * p.ln())
        .sum();

    // Dimension bound S ≤ min(ln #A-patterns, ln #B-patterns).
    let nb = {
        let mut b: Vec<u128> = masks.iter().map(|m| m & part.b_mask()).collect();
        b.sort_unstable();
        b.dedup();
        b.len()
    };
    let bound = (rdm.dim() as f64).ln().min((nb as f64).ln());
    debug_assert!(s <= bound + 1e-9, "entropy {s} exceeds bound {bound}");
    s
}
