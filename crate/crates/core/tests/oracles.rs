//! Oracle-equivalence suite: every assembly and propagation path is checked
//! against an independent construction built straight from the operator
//! definitions.

mod common;

use common::{
    dense_gas_full, dense_qdm_full, expm_evolve, gas_oracle_max_deviation, matching_count,
};
use num_complex::Complex64;

use qrelax_core::correlate::{gas_autocorrelator, general_autocorrelator};
use qrelax_core::dimer::{
    build_flux_sector, build_qdm_hamiltonian, enumerate_coverings, FluxVector, TorusGeometry,
};
use qrelax_core::ensemble::{frobenius_distance, time_integrated_ensemble, EnsembleState};
use qrelax_core::gas::{
    build_gas_hamiltonian, build_strip, enumerate_sector, restrict_hamiltonian, Occupation,
};
use qrelax_core::grid::TimeGrid;
use qrelax_core::krylov::{krylov_step, lanczos_ground_state, GroundStateOptions, KrylovOptions};
use qrelax_core::reference::MetastableReference;
use qrelax_core::spectral::{diagonal_ensemble, evolve_spectral, full_diagonalize};
use qrelax_core::state::StateVector;

fn sup_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amp
        .iter()
        .zip(&b.amp)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn gas_assembly_equals_dense_oracle_exactly() {
    for (l, n, lambda) in [(6usize, 4usize, 0.5f64), (8, 6, 0.3), (8, 6, 1.0), (8, 5, 0.8)] {
        let geom = build_strip(l).unwrap();
        let holes: Vec<usize> = (0..l - n).collect();
        let seed = Occupation::from_vacancies(l, &holes);
        let basis = enumerate_sector(&geom, n, seed).unwrap();
        let h = build_gas_hamiltonian(&basis, lambda).unwrap();
        h.validate().unwrap();
        let dense = dense_gas_full(&geom, lambda);
        let dev = gas_oracle_max_deviation(&h, &basis, &dense);
        assert_eq!(dev, 0.0, "L={l} N={n} lambda={lambda}: deviation {dev:e}");
    }
}

#[test]
fn qdm_assembly_equals_dense_oracle_exactly() {
    let geom = TorusGeometry::new(4, 4).unwrap();
    let coverings = enumerate_coverings(&geom);
    let dense = dense_qdm_full(&geom, &coverings, 2.5);
    let full_index: std::collections::HashMap<u128, usize> = coverings
        .iter()
        .enumerate()
        .map(|(i, c)| (c.0, i))
        .collect();
    for flux in [FluxVector { x: 0, y: 0 }, FluxVector { x: 1, y: 0 }] {
        let sector = build_flux_sector(&geom, &coverings, flux).unwrap();
        let h = build_qdm_hamiltonian(&sector, 2.5);
        h.validate().unwrap();
        for (i, si) in sector.states().iter().enumerate() {
            let ci = full_index[&si.0];
            // No coupling out of the sector in the oracle.
            for (t, &cfg) in coverings.iter().enumerate() {
                if dense[t][ci] != 0.0 && sector.index_of(cfg).is_none() {
                    panic!("oracle couples flux sectors");
                }
            }
            for (j, sj) in sector.states().iter().enumerate() {
                let cj = full_index[&sj.0];
                assert_eq!(h.get(i, j), dense[cj][ci], "entry ({i},{j})");
            }
        }
    }
}

#[test]
fn dimer_counts_match_permanent_oracle() {
    let g22 = TorusGeometry::new(2, 2).unwrap();
    assert_eq!(enumerate_coverings(&g22).len() as u64, matching_count(&g22));
    let g44 = TorusGeometry::new(4, 4).unwrap();
    let n44 = enumerate_coverings(&g44).len() as u64;
    assert_eq!(n44, matching_count(&g44));
    assert_eq!(n44, 272);
}

#[test]
fn spectral_evolution_matches_matrix_exponential() {
    // Gas sector, dim 12.
    let geom = build_strip(6).unwrap();
    let basis = enumerate_sector(&geom, 4, Occupation::from_vacancies(6, &[4, 5])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.3).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let mut psi0 = StateVector::basis(basis.dim(), 0);
    psi0.amp[3] = Complex64::new(0.0, 0.6);
    psi0.normalize();
    let grid = TimeGrid::from_times(vec![0.7, 3.0, 10.0]).unwrap();
    let states = evolve_spectral(&eig, &psi0, &grid).unwrap();
    for (k, &t) in grid.times().iter().enumerate() {
        let oracle = expm_evolve(&h, &psi0, t);
        assert!(sup_diff(&states[k], &oracle) < 1e-8, "t={t}");
    }

    // Dimer sector, dim 132 (≤ 300).
    let tg = TorusGeometry::new(4, 4).unwrap();
    let coverings = enumerate_coverings(&tg);
    let sector = build_flux_sector(&tg, &coverings, FluxVector { x: 0, y: 0 }).unwrap();
    let hq = build_qdm_hamiltonian(&sector, 3.0);
    let eq = full_diagonalize(&hq, 1000).unwrap();
    let phi0 = StateVector::basis(sector.dim(), 17);
    let tq = 2.0;
    let got = evolve_spectral(&eq, &phi0, &TimeGrid::from_times(vec![tq]).unwrap()).unwrap();
    let oracle = expm_evolve(&hq, &phi0, tq);
    assert!(sup_diff(&got[0], &oracle) < 1e-8);
}

#[test]
fn krylov_step_matches_spectral_on_gas_sector() {
    let geom = build_strip(8).unwrap();
    let basis = enumerate_sector(&geom, 6, Occupation::from_vacancies(8, &[6, 7])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.4).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let psi0 = StateVector::basis(basis.dim(), 2);
    let exact = &evolve_spectral(&eig, &psi0, &TimeGrid::from_times(vec![1.0]).unwrap()).unwrap()[0];
    let opts = KrylovOptions {
        subspace: 30,
        tol: 1e-10,
        max_halvings: 40,
    };
    let approx = krylov_step(&h, &psi0, 1.0, &opts).unwrap();
    assert!(sup_diff(exact, &approx) < 1e-8);
}

#[test]
fn ground_state_scan_matches_dense_minima() {
    let geom = build_strip(12).unwrap();
    let basis = enumerate_sector(&geom, 8, Occupation::from_vacancies(12, &[0, 1, 2, 3])).unwrap();
    for lambda in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let h = build_gas_hamiltonian(&basis, lambda).unwrap();
        let eig = full_diagonalize(&h, 10_000).unwrap();
        let (e0, _) = lanczos_ground_state(&h, 1e-10, &GroundStateOptions::default()).unwrap();
        assert!(
            (e0 - eig.ground_energy()).abs() < 1e-8,
            "lambda={lambda}: {e0} vs {}",
            eig.ground_energy()
        );
    }
}

#[test]
fn balanced_coupling_ground_state_is_uniform_with_zero_energy() {
    let geom = build_strip(12).unwrap();
    let basis = enumerate_sector(&geom, 8, Occupation::from_vacancies(12, &[0, 1, 2, 3])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.5).unwrap();
    let (e0, v0) = lanczos_ground_state(&h, 1e-10, &GroundStateOptions::default()).unwrap();
    assert!(e0.abs() < 1e-10);
    // Uniform sign across the whole sector.
    let signs: Vec<f64> = v0.iter().map(|x| x.signum()).collect();
    assert!(signs.windows(2).all(|w| w[0] == w[1]));
    let spread = v0.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
        (lo.min(x.abs()), hi.max(x.abs()))
    });
    assert!((spread.1 - spread.0) / spread.1 < 1e-6, "not uniform: {spread:?}");
}

#[test]
fn diagonal_ensemble_matches_long_time_average() {
    let geom = build_strip(8).unwrap();
    let basis = enumerate_sector(&geom, 6, Occupation::from_vacancies(8, &[6, 7])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.3).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let psi0 = StateVector::basis(basis.dim(), 1);
    let site_obs = basis.occupancy_column(3);
    let de = diagonal_ensemble(&eig, &psi0, &site_obs).unwrap();
    // Plain average over a late two-decade window.
    let grid = TimeGrid::log_spaced(1e7, 1e8, 96).unwrap();
    let states = evolve_spectral(&eig, &psi0, &grid).unwrap();
    let mean: f64 = states
        .iter()
        .map(|s| s.expect_diagonal(&site_obs))
        .sum::<f64>()
        / states.len() as f64;
    assert!((mean - de).abs() < 1e-3, "mean {mean} vs de {de}");
}

#[test]
fn general_correlator_matches_heisenberg_oracle() {
    let geom = build_strip(6).unwrap();
    let basis = enumerate_sector(&geom, 4, Occupation::from_vacancies(6, &[4, 5])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.4).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let d = basis.dim();
    // Entangled initial state.
    let mut psi0 = StateVector::basis(d, 0);
    psi0.amp[4] = Complex64::new(0.5, 0.0);
    psi0.amp[7] = Complex64::new(0.0, -0.3);
    psi0.normalize();
    let grid = TimeGrid::from_times(vec![0.5, 2.0, 9.0]).unwrap();
    let series = general_autocorrelator(&eig, &basis, &psi0, &grid).unwrap();

    let l = basis.site_count();
    let phi = basis.filling();
    for (k, &t) in grid.times().iter().enumerate() {
        // Oracle: evolve ψ₀ and each n_iψ₀ with the dense exponential.
        let psi_t = expm_evolve(&h, &psi0, t);
        let mut total = 0.0;
        for i in 0..l {
            let masked = StateVector::new(
                psi0.amp
                    .iter()
                    .zip(basis.states())
                    .map(|(z, occ)| if occ.is_occupied(i) { *z } else { Complex64::new(0.0, 0.0) })
                    .collect(),
            );
            let chi_t = expm_evolve(&h, &masked, t);
            let ni_chi = StateVector::new(
                chi_t
                    .amp
                    .iter()
                    .zip(basis.states())
                    .map(|(z, occ)| if occ.is_occupied(i) { *z } else { Complex64::new(0.0, 0.0) })
                    .collect(),
            );
            total += psi_t.dot(&ni_chi).unwrap().re;
        }
        let oracle = total / (l as f64 * phi * (1.0 - phi)) - phi / (1.0 - phi);
        assert!(
            (series.values[k] - oracle).abs() < 1e-8,
            "t={t}: {} vs {oracle}",
            series.values[k]
        );
    }
}

#[test]
fn general_correlator_reduces_to_product_form_on_basis_states() {
    let geom = build_strip(8).unwrap();
    let basis = enumerate_sector(&geom, 6, Occupation::from_vacancies(8, &[6, 7])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.6).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let initial = basis.states()[5];
    let grid = TimeGrid::log_spaced(0.1, 100.0, 6).unwrap();
    let product = gas_autocorrelator(&eig, &basis, initial, &grid).unwrap();
    let general = general_autocorrelator(
        &eig,
        &basis,
        &StateVector::basis(basis.dim(), 5),
        &grid,
    )
    .unwrap();
    for (a, b) in product.values.iter().zip(&general.values) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn uniform_state_correlator_is_stationary_at_balanced_coupling() {
    let geom = build_strip(8).unwrap();
    let basis = enumerate_sector(&geom, 6, Occupation::from_vacancies(8, &[6, 7])).unwrap();
    let h = build_gas_hamiltonian(&basis, 0.5).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let grid = TimeGrid::log_spaced(0.1, 1e4, 6).unwrap();
    let series =
        general_autocorrelator(&eig, &basis, &StateVector::uniform(basis.dim()), &grid).unwrap();
    for v in &series.values {
        assert!((v - series.values[0]).abs() < 1e-9);
    }
    assert!((series.values[0] - 1.0).abs() < 1e-12);
}

#[test]
fn ensemble_purity_and_distance_match_dense_density_matrices() {
    let geom = build_strip(10).unwrap();
    let basis = enumerate_sector(&geom, 7, Occupation::from_vacancies(10, &[0, 1, 5])).unwrap();
    let d = basis.dim();
    assert!(d <= 200, "oracle sector meant to stay small, got {d}");
    let h = build_gas_hamiltonian(&basis, 0.35).unwrap();
    let eig = full_diagonalize(&h, 1000).unwrap();
    let grid = TimeGrid::log_spaced(0.1, 100.0, 8).unwrap();
    let psi0 = StateVector::basis(d, 0);
    let states = evolve_spectral(&eig, &psi0, &grid).unwrap();
    let rho = time_integrated_ensemble(&states, &grid, 100.0).unwrap();

    // Dense ρ̄ = Σ w ψψ†.
    let mut dense = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (w, psi) in rho.members() {
        for i in 0..d {
            for j in 0..d {
                dense[i][j] += psi.amp[i] * psi.amp[j].conj() * w;
            }
        }
    }
    let purity_dense: f64 = (0..d)
        .map(|i| (0..d).map(|j| (dense[i][j] * dense[j][i]).re).sum::<f64>())
        .sum();
    assert!((rho.purity() - purity_dense).abs() < 1e-8);

    // Distance against a second ensemble, dense evaluation.
    let psi1 = StateVector::basis(d, 1);
    let states1 = evolve_spectral(&eig, &psi1, &grid).unwrap();
    let sigma = time_integrated_ensemble(&states1, &grid, 100.0).unwrap();
    let mut dense_s = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (w, psi) in sigma.members() {
        for i in 0..d {
            for j in 0..d {
                dense_s[i][j] += psi.amp[i] * psi.amp[j].conj() * w;
            }
        }
    }
    let tr = |a: &Vec<Vec<Complex64>>, b: &Vec<Vec<Complex64>>| -> f64 {
        (0..d)
            .map(|i| (0..d).map(|j| (a[i][j] * b[j][i]).re).sum::<f64>())
            .sum()
    };
    let dist_dense = ((tr(&dense, &dense) + tr(&dense_s, &dense_s) - 2.0 * tr(&dense, &dense_s))
        .max(0.0))
    .sqrt()
        / (tr(&dense, &dense) + tr(&dense_s, &dense_s)).sqrt();
    let dist = frobenius_distance(&rho, &sigma).unwrap();
    assert!((dist - dist_dense).abs() < 1e-8, "{dist} vs {dist_dense}");
}

#[test]
fn early_evolution_factorizes_through_the_restricted_slice() {
    // Vacancy dimer confined between barriers: over the early window the full
    // evolution stays on the frozen-outside slice and matches the compressed
    // dynamics there.
    let r = MetastableReference::new(16);
    let geom = build_strip(16).unwrap();
    let occ = r.initial_occupation();
    let basis = enumerate_sector(&geom, r.particles, occ).unwrap();
    let lambda = 0.2;
    let h = build_gas_hamiltonian(&basis, lambda).unwrap();
    let eig = full_diagonalize(&h, 10_000).unwrap();
    let restricted = restrict_hamiltonian(&basis, lambda, r.window, r.frozen_outside()).unwrap();
    let emb = restricted.embedding(&basis);
    let eig_a = full_diagonalize(restricted.hamiltonian(), 10_000).unwrap();

    let k0 = basis.index_of(occ).unwrap();
    let a0 = restricted.index_of(occ).unwrap();
    let psi0_full = StateVector::basis(basis.dim(), k0);
    let psi0_a = StateVector::basis(restricted.dim(), a0);
    for t in [1.0, 5.0, 20.0] {
        let full = evolve_spectral(&eig, &psi0_full, &TimeGrid::from_times(vec![t]).unwrap())
            .unwrap()
            .remove(0);
        let slice = evolve_spectral(&eig_a, &psi0_a, &TimeGrid::from_times(vec![t]).unwrap())
            .unwrap()
            .remove(0);
        let mut embedded = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for (a, &full_idx) in emb.iter().enumerate() {
            embedded[full_idx] = slice.amp[a];
        }
        let sup: f64 = full
            .amp
            .iter()
            .zip(&embedded)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(sup <= 1e-2, "t={t}: sup-norm {sup:e}");
    }
}
