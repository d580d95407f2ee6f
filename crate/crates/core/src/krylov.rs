//! Lanczos-subspace propagation and ground-state solves for sectors above
//! the dense cap (and as an independent route below it).

use faer::prelude::*;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::sparse::SparseHermitianMatrix;
use crate::spectral::symmetric_eigen;
use crate::state::StateVector;

/// Controls for one Krylov propagation step.
#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Lanczos subspace size per substep.
    pub subspace: usize,
    /// Target local error per requested step.
    pub tol: f64,
    /// Maximum number of times a substep may be halved.
    pub max_halvings: u32,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            subspace: 40,
            tol: 1e-9,
            max_halvings: 40,
        }
    }
}

struct LanczosFactorization {
    /// Orthonormal complex basis vectors, column by column.
    basis: Vec<Vec<Complex64>>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    /// Norm of the residual vector after the last step (0 on happy breakdown).
    beta_out: f64,
}

/// Lanczos recurrence with full reorthogonalization.
fn lanczos_complex(
    h: &SparseHermitianMatrix,
    start: &[Complex64],
    m: usize,
) -> LanczosFactorization {
    let dim = h.dim();
    let m = m.min(dim);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut alphas = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m.saturating_sub(1));

    let norm0 = norm(start);
    let mut v: Vec<Complex64> = start.iter().map(|z| z / norm0).collect();
    let mut beta_out = 0.0;
    for j in 0..m {
        basis.push(v.clone());
        let mut w = h.apply_complex(&v);
        let alpha = dot_re(&basis[j], &w);
        alphas.push(alpha);
        // Full reorthogonalization, two passes.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(&mut w, b, -c);
            }
        }
        let beta = norm(&w);
        beta_out = beta;
        if beta < 1e-13 {
            break;
        }
        if j + 1 < m {
            betas.push(beta);
            for z in &mut w {
                *z /= beta;
            }
            v = w;
        }
    }
    LanczosFactorization {
        basis,
        alphas,
        betas,
        beta_out,
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn dot_re(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

fn axpy(y: &mut [Complex64], x: &[Complex64], c: Complex64) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// Eigendecompose the small tridiagonal matrix built from Lanczos scalars.
fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
    let k = alphas.len();
    let mut t = Mat::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    symmetric_eigen(t.as_ref())
}

/// One adaptive step of `ψ ↦ e^{-iHΔt}ψ`.
///
/// The requested interval is consumed in substeps. Each substep reuses one
/// Lanczos factorization and halves its width until the residual-flow
/// estimate `β_m |y_m|` drops below the proportional share of `tol`; the
/// accepted width seeds the next substep and is allowed to grow back.
pub fn krylov_step(
    h: &SparseHermitianMatrix,
    psi: &StateVector,
    dt: f64,
    opts: &KrylovOptions,
) -> Result<StateVector> {
    if dt == 0.0 {
        return Ok(psi.clone());
    }
    let mut current = psi.amp.clone();
    let mut remaining = dt;
    let mut step_hint = dt;
    while remaining > 0.0 {
        let fac = lanczos_complex(h, &current, opts.subspace);
        let k = fac.alphas.len();
        let (theta, z) = tridiagonal_eigen(&fac.alphas, &fac.betas)?;
        let norm_in = norm(&current);

        let mut step = step_hint.min(remaining);
        let mut halvings = 0u32;
        loop {
            // y = e^{-iTτ} (‖ψ‖ e₁) expressed through the Ritz decomposition.
            let y = small_exponential(&theta, &z, step, norm_in);
            let err = if fac.beta_out < 1e-13 {
                0.0
            } else {
                fac.beta_out * y[k - 1].norm()
            };
            let budget = opts.tol * (step / dt).max(f64::MIN_POSITIVE);
            if err <= budget {
                let mut next = vec![Complex64::new(0.0, 0.0); current.len()];
                for (j, b) in fac.basis.iter().enumerate() {
                    axpy(&mut next, b, y[j]);
                }
                current = next;
                remaining -= step;
                // Let the width recover so long stretches are not stuck at
                // the smallest step ever needed.
                step_hint = step * 2.0;
                break;
            }
            if halvings == opts.max_halvings {
                return Err(Error::KrylovNoConvergence {
                    err,
                    tol: opts.tol,
                    halvings,
                });
            }
            halvings += 1;
            step *= 0.5;
        }
    }
    Ok(StateVector::new(current))
}

/// y = Z e^{-iΘτ} Zᵀ (scale·e₁) for the small Ritz system.
fn small_exponential(theta: &[f64], z: &Mat<f64>, tau: f64, scale: f64) -> Vec<Complex64> {
    let k = theta.len();
    let mut y = vec![Complex64::new(0.0, 0.0); k];
    for r in 0..k {
        let w = z[(0, r)] * scale;
        let phase = -theta[r] * tau;
        let c = Complex64::new(phase.cos(), phase.sin()) * w;
        for i in 0..k {
            y[i] += c * z[(i, r)];
        }
    }
    y
}

/// Propagate through every grid time with Krylov stepping, recording the
/// state at each grid point.
pub fn propagate_on_grid(
    h: &SparseHermitianMatrix,
    psi0: &StateVector,
    grid: &TimeGrid,
    opts: &KrylovOptions,
) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut psi = psi0.clone();
    let mut t = 0.0;
    for &target in grid.times() {
        psi = krylov_step(h, &psi, target - t, opts)?;
        t = target;
        out.push(psi.clone());
    }
    Ok(out)
}

/// Controls for the restarted Lanczos ground-state solve.
#[derive(Debug, Clone, Copy)]
pub struct GroundStateOptions {
    pub subspace: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            subspace: 60,
            max_restarts: 400,
            seed: 0x5eed,
        }
    }
}

/// Lowest eigenpair by restarted Lanczos: iterate the factorization from the
/// current best Ritz vector until `‖Hv - E₀v‖ ≤ tol`.
pub fn lanczos_ground_state(
    h: &SparseHermitianMatrix,
    tol: f64,
    opts: &GroundStateOptions,
) -> Result<(f64, Vec<f64>)> {
    let dim = h.dim();
    if dim == 0 {
        return Err(Error::EmptyCollection);
    }
    if dim == 1 {
        return Ok((h.get(0, 0), vec![1.0]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    normalize_real(&mut v);

    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_restarts {
        let (basis, alphas, betas) = lanczos_real(h, &v, opts.subspace, &mut rng);
        let (_, z) = tridiagonal_eigen(&alphas, &betas)?;
        let mut ritz = vec![0.0; dim];
        for (j, b) in basis.iter().enumerate() {
            let c = z[(j, 0)];
            for i in 0..dim {
                ritz[i] += c * b[i];
            }
        }
        normalize_real(&mut ritz);
        let hr = h.apply(&ritz);
        let energy = ritz.iter().zip(&hr).map(|(a, b)| a * b).sum::<f64>();
        residual = hr
            .iter()
            .zip(&ritz)
            .map(|(hv, vv)| (hv - energy * vv).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol {
            return Ok((energy, ritz));
        }
        v = ritz;
    }
    Err(Error::GroundStateNoConvergence {
        restarts: opts.max_restarts,
        residual,
        tol,
    })
}

fn normalize_real(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Real-arithmetic Lanczos with full reorthogonalization. On breakdown the
/// recurrence restarts from a fresh random direction orthogonal to the
/// current basis, which keeps small invariant subspaces from stalling.
fn lanczos_real(
    h: &SparseHermitianMatrix,
    start: &[f64],
    m: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let dim = h.dim();
    let m = m.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alphas = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m.saturating_sub(1));
    let mut v = start.to_vec();
    normalize_real(&mut v);
    for j in 0..m {
        basis.push(v.clone());
        let mut w = h.apply(&v);
        let alpha = basis[j].iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let c = b.iter().zip(&w).map(|(a, x)| a * x).sum::<f64>();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if j + 1 < m {
            if beta < 1e-13 {
                // Invariant subspace hit: continue in a fresh direction.
                let mut fresh: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
                for _ in 0..2 {
                    for b in &basis {
                        let c = b.iter().zip(&fresh).map(|(a, x)| a * x).sum::<f64>();
                        for (fi, bi) in fresh.iter_mut().zip(b) {
                            *fi -= c * bi;
                        }
                    }
                }
                let n = fresh.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n < 1e-13 {
                    break;
                }
                betas.push(0.0);
                for x in fresh.iter_mut() {
                    *x /= n;
                }
                v = fresh;
            } else {
                betas.push(beta);
                for x in w.iter_mut() {
                    *x /= beta;
                }
                v = w;
            }
        }
    }
    (basis, alphas, betas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{evolve_spectral, full_diagonalize};

    fn chain(n: usize) -> SparseHermitianMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i as u32, 0.3 + 0.1 * i as f64)];
                if i > 0 {
                    r.push((i as u32 - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i as u32 + 1, -1.0));
                }
                r
            })
            .collect();
        SparseHermitianMatrix::from_rows(rows)
    }

    #[test]
    fn zero_step_is_identity() {
        let h = chain(8);
        let psi = StateVector::basis(8, 3);
        let out = krylov_step(&h, &psi, 0.0, &KrylovOptions::default()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn full_subspace_matches_spectral_evolution() {
        let h = chain(12);
        let eig = full_diagonalize(&h, 100).unwrap();
        let psi0 = StateVector::basis(12, 5);
        let grid = TimeGrid::from_times(vec![1.0]).unwrap();
        let exact = &evolve_spectral(&eig, &psi0, &grid).unwrap()[0];
        let opts = KrylovOptions {
            subspace: 12,
            tol: 1e-12,
            max_halvings: 4,
        };
        let approx = krylov_step(&h, &psi0, 1.0, &opts).unwrap();
        let err: f64 = exact
            .amp
            .iter()
            .zip(&approx.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err = {err:e}");
    }

    #[test]
    fn adaptive_stepping_tracks_long_evolution() {
        let h = chain(24);
        let eig = full_diagonalize(&h, 100).unwrap();
        let psi0 = StateVector::basis(24, 0);
        let grid = TimeGrid::from_times(vec![0.5, 5.0, 50.0]).unwrap();
        let exact = evolve_spectral(&eig, &psi0, &grid).unwrap();
        let opts = KrylovOptions {
            subspace: 12,
            tol: 1e-10,
            max_halvings: 60,
        };
        let approx = propagate_on_grid(&h, &psi0, &grid, &opts).unwrap();
        for (e, a) in exact.iter().zip(&approx) {
            assert!((a.norm() - 1.0).abs() < 1e-10);
            let err: f64 = e
                .amp
                .iter()
                .zip(&a.amp)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "err = {err:e}");
        }
    }

    #[test]
    fn ground_state_of_chain_matches_dense() {
        let h = chain(40);
        let eig = full_diagonalize(&h, 100).unwrap();
        let (e0, v0) = lanczos_ground_state(&h, 1e-10, &GroundStateOptions::default()).unwrap();
        assert!((e0 - eig.ground_energy()).abs() < 1e-9);
        let hv = h.apply(&v0);
        let res: f64 = hv
            .iter()
            .zip(&v0)
            .map(|(a, b)| (a - e0 * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-10);
    }

    #[test]
    fn ground_state_of_singleton_is_its_entry() {
        let h = SparseHermitianMatrix::from_rows(vec![vec![(0, 4.25)]]);
        let (e0, v0) = lanczos_ground_state(&h, 1e-12, &GroundStateOptions::default()).unwrap();
        assert_eq!(e0, 4.25);
        assert_eq!(v0, vec![1.0]);
    }
}
