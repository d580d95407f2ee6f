//! Dense spectral decomposition and exact unitary evolution.
//!
//! The dense path serves every sector that fits under the dimension cap.
//! Two-time correlators need states at hundreds of grid times, which the
//! spectral form delivers as one pair of real GEMMs per batch.

use faer::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::sparse::SparseHermitianMatrix;
use crate::state::StateVector;

/// Default cap on dense diagonalization. Sectors above it take the Krylov
/// path. Overridable per call (the CLI wires an environment variable to it).
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Eigenvalues in ascending order with the orthonormal eigenvector matrix.
#[derive(Debug, Clone)]
pub struct DenseEigensystem {
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

/// Dense symmetric eigendecomposition of a sector Hamiltonian.
pub fn full_diagonalize(h: &SparseHermitianMatrix, cap: usize) -> Result<DenseEigensystem> {
    if h.dim() > cap {
        return Err(Error::DenseCapExceeded {
            dim: h.dim(),
            cap,
        });
    }
    let dense = h.to_dense();
    let (eigenvalues, vectors) = symmetric_eigen(dense.as_ref())?;
    Ok(DenseEigensystem {
        eigenvalues,
        vectors,
    })
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub(crate) fn symmetric_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = m.nrows();
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).expect("eigenvalue is NaN"));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| s[k]).collect();
    let mut vectors = Mat::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = u[(i, src)];
        }
    }
    Ok((eigenvalues, vectors))
}

impl DenseEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    /// Spectral norm of the operator (largest eigenvalue magnitude).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0f64, |m, &e| m.max(e.abs()))
    }

    /// Overlap vector Qᵀψ, split into real and imaginary parts.
    pub(crate) fn to_eigenbasis(&self, psi: &StateVector) -> (Col<f64>, Col<f64>) {
        let d = self.dim();
        debug_assert_eq!(psi.dim(), d);
        let re = Col::<f64>::from_fn(d, |i| psi.amp[i].re);
        let im = Col::<f64>::from_fn(d, |i| psi.amp[i].im);
        let q_t = self.vectors.transpose();
        (q_t * re, q_t * im)
    }

    /// Check residual and orthonormality against the assembled matrix.
    pub fn verify(&self, h: &SparseHermitianMatrix) -> (f64, f64) {
        let d = self.dim();
        let mut max_residual: f64 = 0.0;
        let mut col = vec![0.0; d];
        let mut hq = vec![0.0; d];
        for j in 0..d {
            for i in 0..d {
                col[i] = self.vectors[(i, j)];
            }
            h.matvec(&col, &mut hq);
            for i in 0..d {
                max_residual = max_residual.max((hq[i] - self.eigenvalues[j] * col[i]).abs());
            }
        }
        let gram = self.vectors.transpose() * &self.vectors;
        let mut max_orth: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                max_orth = max_orth.max((gram[(i, j)] - target).abs());
            }
        }
        (max_residual, max_orth)
    }
}

/// Evolve `ψ(t_k) = Σ_n e^{-iE_n t_k} ⟨n|ψ₀⟩ |n⟩` at every grid time.
pub fn evolve_spectral(
    eig: &DenseEigensystem,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<Vec<StateVector>> {
    if psi0.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: eig.dim(),
        });
    }
    let d = eig.dim();
    let times = grid.times();
    let nt = times.len();
    let (yre, yim) = eig.to_eigenbasis(psi0);

    // C[n,k] = e^{-iE_n t_k} (yre + i·yim)_n, split into real and imaginary.
    let mut cre = Mat::<f64>::zeros(d, nt);
    let mut cim = Mat::<f64>::zeros(d, nt);
    for (k, &t) in times.iter().enumerate() {
        for n in 0..d {
            let phase = eig.eigenvalues[n] * t;
            let (s, c) = phase.sin_cos();
            cre[(n, k)] = yre[n] * c + yim[n] * s;
            cim[(n, k)] = yim[n] * c - yre[n] * s;
        }
    }
    let psi_re = &eig.vectors * cre;
    let psi_im = &eig.vectors * cim;

    let mut out = Vec::with_capacity(nt);
    for k in 0..nt {
        let amp: Vec<Complex64> = (0..d)
            .map(|i| Complex64::new(psi_re[(i, k)], psi_im[(i, k)]))
            .collect();
        let state = StateVector::new(amp);
        debug_assert!((state.norm() - psi0.norm()).abs() < 1e-9);
        out.push(state);
    }
    Ok(out)
}

/// Evolve to a single time.
pub fn evolve_at(eig: &DenseEigensystem, psi0: &StateVector, t: f64) -> Result<StateVector> {
    let grid = TimeGrid::from_times(vec![t.max(f64::MIN_POSITIVE)])?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    Ok(evolve_spectral(eig, psi0, &grid)?.pop().unwrap())
}

/// Relative gap below which neighboring eigenvalues count as degenerate.
pub const DEGENERACY_RELATIVE_TOL: f64 = 1e-10;

/// Consecutive index ranges of (near-)degenerate eigenvalues.
pub fn degenerate_blocks(eigenvalues: &[f64]) -> Vec<std::ops::Range<usize>> {
    let d = eigenvalues.len();
    let scale = eigenvalues
        .iter()
        .fold(0.0f64, |m, &e| m.max(e.abs()))
        .max(1e-300);
    let tol = DEGENERACY_RELATIVE_TOL * scale;
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..d {
        if eigenvalues[i] - eigenvalues[i - 1] >= tol {
            blocks.push(start..i);
            start = i;
        }
    }
    blocks.push(start..d);
    blocks
}

/// Dephased long-time average Σ_B ⟨P_B ψ₀| A |P_B ψ₀⟩ of an observable that
/// is diagonal in the sector basis, with exact and near degeneracies grouped
/// into blocks so the value is invariant under re-orthogonalization inside
/// each block.
pub fn diagonal_ensemble(
    eig: &DenseEigensystem,
    psi0: &StateVector,
    observable: &[f64],
) -> Result<f64> {
    if psi0.dim() != eig.dim() || observable.len() != eig.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: eig.dim(),
        });
    }
    let d = eig.dim();
    let (cre, cim) = eig.to_eigenbasis(psi0);
    let mut value = 0.0;
    for block in degenerate_blocks(&eig.eigenvalues) {
        let width = block.len();
        let sub = self_submatrix(&eig.vectors, block.start, width, d);
        let bre = Col::<f64>::from_fn(width, |k| cre[block.start + k]);
        let bim = Col::<f64>::from_fn(width, |k| cim[block.start + k]);
        let phi_re = &sub * bre;
        let phi_im = &sub * bim;
        for s in 0..d {
            value += observable[s] * (phi_re[s] * phi_re[s] + phi_im[s] * phi_im[s]);
        }
    }
    Ok(value)
}

fn self_submatrix(m: &Mat<f64>, col_start: usize, width: usize, rows: usize) -> MatRef<'_, f64> {
    m.as_ref().submatrix(0, col_start, rows, width)
}

/// ⟨ψ|H|ψ⟩ for a real symmetric operator (real by hermiticity).
pub fn energy_expectation(h: &SparseHermitianMatrix, psi: &StateVector) -> f64 {
    let hpsi = h.apply_complex(&psi.amp);
    psi.amp
        .iter()
        .zip(&hpsi)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one(v: f64) -> SparseHermitianMatrix {
        SparseHermitianMatrix::from_rows(vec![vec![(0, v)]])
    }

    #[test]
    fn single_entry_matrix() {
        let eig = full_diagonalize(&one_by_one(-2.5), 10).unwrap();
        assert_eq!(eig.eigenvalues(), &[-2.5]);
        assert!((eig.vectors()[(0, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_matrix_eigenvalues_are_sorted_entries() {
        let h = SparseHermitianMatrix::from_rows(vec![
            vec![(0, 3.0)],
            vec![(1, -1.0)],
            vec![(2, 2.0)],
        ]);
        let eig = full_diagonalize(&h, 10).unwrap();
        assert_eq!(eig.eigenvalues(), &[-1.0, 2.0, 3.0]);
        let (res, orth) = eig.verify(&h);
        assert!(res < 1e-12);
        assert!(orth < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let h = SparseHermitianMatrix::from_rows(vec![vec![(0, 1.0)], vec![(1, 1.0)]]);
        assert!(matches!(
            full_diagonalize(&h, 1),
            Err(Error::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn evolution_at_time_zero_is_identity() {
        let h = SparseHermitianMatrix::from_rows(vec![
            vec![(0, 1.0), (1, -0.5)],
            vec![(0, -0.5), (1, 0.2)],
        ]);
        let eig = full_diagonalize(&h, 10).unwrap();
        let psi0 = StateVector::basis(2, 0);
        let out = evolve_at(&eig, &psi0, 0.0).unwrap();
        assert_eq!(out, psi0);
    }

    #[test]
    fn eigenvector_initial_state_only_acquires_phase() {
        let h = SparseHermitianMatrix::from_rows(vec![
            vec![(0, 1.0), (1, -0.7)],
            vec![(0, -0.7), (1, -0.3)],
        ]);
        let eig = full_diagonalize(&h, 10).unwrap();
        let v0 = StateVector::from_real(&[eig.vectors()[(0, 0)], eig.vectors()[(1, 0)]]);
        let grid = TimeGrid::log_spaced(0.1, 100.0, 8).unwrap();
        for psi in evolve_spectral(&eig, &v0, &grid).unwrap() {
            let overlap = v0.dot(&psi).unwrap().norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_and_energy_are_conserved() {
        let h = SparseHermitianMatrix::from_rows(vec![
            vec![(0, 0.4), (1, -0.5), (2, 0.1)],
            vec![(0, -0.5), (1, 0.9)],
            vec![(0, 0.1), (2, -0.6)],
        ]);
        let eig = full_diagonalize(&h, 10).unwrap();
        let mut psi0 = StateVector::from_real(&[0.5, -0.3, 0.8]);
        psi0.normalize();
        let e0 = energy_expectation(&h, &psi0);
        let grid = TimeGrid::log_spaced(0.1, 1e5, 6).unwrap();
        for psi in evolve_spectral(&eig, &psi0, &grid).unwrap() {
            assert!((psi.norm() - 1.0).abs() < 1e-10);
            let e = energy_expectation(&h, &psi);
            assert!((e - e0).abs() <= 1e-9 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn diagonal_ensemble_of_identity_is_one() {
        let h = SparseHermitianMatrix::from_rows(vec![
            vec![(0, 0.4), (1, -0.5)],
            vec![(0, -0.5), (1, 0.9)],
        ]);
        let eig = full_diagonalize(&h, 10).unwrap();
        let mut psi0 = StateVector::from_real(&[0.6, 0.8]);
        psi0.normalize();
        let one = diagonal_ensemble(&eig, &psi0, &[1.0, 1.0]).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_ensemble_of_eigenvector_is_plain_expectation() {
        let h = SparseHermitianMatrix::from_rows(vec![
            vec![(0, 0.4), (1, -0.5)],
            vec![(0, -0.5), (1, 0.9)],
        ]);
        let eig = full_diagonalize(&h, 10).unwrap();
        let v = StateVector::from_real(&[eig.vectors()[(0, 1)], eig.vectors()[(1, 1)]]);
        let obs = vec![2.0, -1.0];
        let de = diagonal_ensemble(&eig, &v, &obs).unwrap();
        assert!((de - v.expect_diagonal(&obs)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_blocks_group_ties() {
        let blocks = degenerate_blocks(&[0.0, 0.0, 1.0, 1.0 + 1e-16, 2.0]);
        assert_eq!(blocks, vec![0..2, 2..4, 4..5]);
    }
}
