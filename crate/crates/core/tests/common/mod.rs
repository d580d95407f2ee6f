//! Independent oracles used by the integration and acceptance suites.
//!
//! Everything here is built directly from operator definitions or textbook
//! algorithms, deliberately sharing no code with the assembly and
//! propagation paths it checks.

#![allow(dead_code)]

use faer::c64;
use faer::prelude::*;
use num_complex::Complex64;

use qrelax_core::dimer::{
    flip_plaquette, DimerConfiguration, TorusGeometry,
};
use qrelax_core::gas::{constraint_value, GasSectorBasis, Occupation, StripGeometry};
use qrelax_core::sparse::SparseHermitianMatrix;
use qrelax_core::state::StateVector;

/// Dense gas Hamiltonian assembled term by term over every bond in the full
/// unconstrained 2^L space. Column c holds H|c⟩.
pub fn dense_gas_full(geom: &StripGeometry, lambda: f64) -> Vec<Vec<f64>> {
    let l = geom.site_count();
    let full = 1usize << l;
    let mut h = vec![vec![0.0f64; full]; full];
    for c in 0..full {
        let occ = Occupation(c as u64);
        for bond in geom.bonds() {
            if constraint_value(occ, bond) == 0 {
                continue;
            }
            let (i, j) = bond.sites;
            if occ.is_occupied(i) != occ.is_occupied(j) {
                h[c][c] += 1.0 - lambda;
                let t = c ^ ((1usize << i) | (1usize << j));
                h[t][c] += -lambda;
            }
        }
    }
    h
}

/// Exact comparison of a sector CSR matrix against the projected dense
/// oracle. Returns the maximum absolute deviation (expected to be exactly 0)
/// and asserts the oracle never couples a sector state to anything outside.
pub fn gas_oracle_max_deviation(
    h: &SparseHermitianMatrix,
    basis: &GasSectorBasis,
    dense: &[Vec<f64>],
) -> f64 {
    let member: std::collections::HashSet<usize> = basis
        .states()
        .iter()
        .map(|s| s.0 as usize)
        .collect();
    let mut max_dev = 0.0f64;
    for (i, si) in basis.states().iter().enumerate() {
        let ci = si.0 as usize;
        for t in 0..dense.len() {
            if dense[t][ci] != 0.0 && !member.contains(&t) {
                panic!("oracle couples sector state {ci:#x} to outside state {t:#x}");
            }
        }
        for (j, sj) in basis.states().iter().enumerate() {
            let dev = (h.get(i, j) - dense[sj.0 as usize][ci]).abs();
            max_dev = max_dev.max(dev);
        }
    }
    max_dev
}

/// Dense QDM Hamiltonian over an explicit covering list, applying the
/// plaquette operators configuration by configuration.
pub fn dense_qdm_full(
    geom: &TorusGeometry,
    coverings: &[DimerConfiguration],
    v: f64,
) -> Vec<Vec<f64>> {
    let index: std::collections::HashMap<u128, usize> = coverings
        .iter()
        .enumerate()
        .map(|(i, c)| (c.0, i))
        .collect();
    let n = coverings.len();
    let mut h = vec![vec![0.0f64; n]; n];
    for (ci, &cfg) in coverings.iter().enumerate() {
        for p in 0..geom.site_count() {
            if let Some(t) = flip_plaquette(geom, cfg, p) {
                h[ci][ci] += v;
                let tj = index[&t.0];
                h[tj][ci] += -1.0;
            }
        }
    }
    h
}

/// Matrix exponential of a dense complex matrix by scaling and squaring with
/// a truncated Taylor series on the scaled matrix.
pub fn expm(a: &Mat<c64>) -> Mat<c64> {
    let n = a.nrows();
    let norm1: f64 = (0..n)
        .map(|j| (0..n).map(|i| abs_c64(a[(i, j)])).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(s as i32);
    let b = Mat::<c64>::from_fn(n, n, |i, j| {
        let z = a[(i, j)];
        c64::new(z.re * scale, z.im * scale)
    });

    let eye = |n: usize| {
        Mat::<c64>::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        })
    };
    let mut result = eye(n);
    let mut term = eye(n);
    for k in 1..60u32 {
        term = &term * &b;
        let inv_k = 1.0 / k as f64;
        let mut max_term = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let z = term[(i, j)];
                let scaled = c64::new(z.re * inv_k, z.im * inv_k);
                term[(i, j)] = scaled;
                max_term = max_term.max(abs_c64(scaled));
                let r = result[(i, j)];
                result[(i, j)] = c64::new(r.re + scaled.re, r.im + scaled.im);
            }
        }
        if max_term < 1e-20 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

fn abs_c64(z: c64) -> f64 {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// exp(-iHt)ψ₀ through the dense exponential oracle.
pub fn expm_evolve(h: &SparseHermitianMatrix, psi0: &StateVector, t: f64) -> StateVector {
    let n = h.dim();
    let a = Mat::<c64>::from_fn(n, n, |i, j| c64::new(0.0, -t * h.get(i, j)));
    let u = expm(&a);
    let mut amp = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = c64::new(0.0, 0.0);
        for j in 0..n {
            let z = psi0.amp[j];
            let uij = u[(i, j)];
            acc = c64::new(
                acc.re + uij.re * z.re - uij.im * z.im,
                acc.im + uij.re * z.im + uij.im * z.re,
            );
        }
        amp[i] = Complex64::new(acc.re, acc.im);
    }
    StateVector::new(amp)
}

/// Number of perfect matchings of the torus multigraph, via Ryser's
/// permanent formula on the even/odd biadjacency matrix with link
/// multiplicities, iterated in Gray-code order.
pub fn matching_count(geom: &TorusGeometry) -> u64 {
    let n_sites = geom.site_count();
    let mut even_pos = vec![usize::MAX; n_sites];
    let mut odd_pos = vec![usize::MAX; n_sites];
    let mut ne = 0;
    let mut no = 0;
    for y in 0..geom.ly {
        for x in 0..geom.lx {
            let s = geom.site(x, y);
            if (x + y) % 2 == 0 {
                even_pos[s] = ne;
                ne += 1;
            } else {
                odd_pos[s] = no;
                no += 1;
            }
        }
    }
    assert_eq!(ne, no);
    let n = ne;
    let mut adj = vec![vec![0i64; n]; n];
    for y in 0..geom.ly {
        for x in 0..geom.lx {
            let s = geom.site(x, y);
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                let o = geom.site(nx, ny);
                let (e, od) = if even_pos[s] != usize::MAX {
                    (even_pos[s], odd_pos[o])
                } else {
                    (even_pos[o], odd_pos[s])
                };
                adj[e][od] += 1;
            }
        }
    }

    // Ryser with Gray-code subset iteration over columns.
    let mut row_sums = vec![0i64; n];
    let mut total: i128 = 0;
    let mut prev_gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let changed = gray ^ prev_gray;
        let j = changed.trailing_zeros() as usize;
        let sign_add = gray & changed != 0;
        for i in 0..n {
            if sign_add {
                row_sums[i] += adj[i][j];
            } else {
                row_sums[i] -= adj[i][j];
            }
        }
        prev_gray = gray;
        let mut prod: i128 = 1;
        for &r in &row_sums {
            prod *= r as i128;
            if prod == 0 {
                break;
            }
        }
        if prod != 0 {
            let parity = (n as u32).wrapping_sub(gray.count_ones());
            if parity % 2 == 0 {
                total += prod;
            } else {
                total -= prod;
            }
        }
    }
    u64::try_from(total).expect("matching count is a nonnegative integer")
}
