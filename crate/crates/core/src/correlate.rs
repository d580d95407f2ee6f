//! Two-time density and dimer autocorrelators.
//!
//! For a product (configuration) initial state the two-time correlator
//! reduces to occupation expectations of the evolved state on the initially
//! occupied sites or links. For entangled initial states both `ψ₀` and
//! `n_iψ₀` are evolved and the real part of the overlap is taken.

use faer::prelude::*;

use crate::dimer::DimerSectorBasis;
use crate::error::{Error, Result};
use crate::gas::{GasSectorBasis, Occupation};
use crate::grid::TimeGrid;
use crate::series::TimeSeries;
use crate::spectral::{diagonal_ensemble, evolve_spectral, DenseEigensystem};
use crate::state::StateVector;

fn check_filling(phi: f64) -> Result<(f64, f64)> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::SingularFilling(phi));
    }
    Ok((phi * (1.0 - phi), phi / (1.0 - phi)))
}

/// Density autocorrelator for a configuration initial state:
/// `c(t) = (1/L) Σ_i ⟨n_i(t) n_i(0)⟩ / (φ(1-φ)) - φ/(1-φ)`, using the
/// product-state reduction to `⟨n_i(t)⟩` on initially occupied sites.
/// Scaled so `c(0) = 1`.
pub fn gas_autocorrelator(
    eig: &DenseEigensystem,
    basis: &GasSectorBasis,
    initial: Occupation,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let index = basis.index_of(initial).ok_or(Error::StateNotInSector)?;
    let (norm, offset) = check_filling(basis.filling())?;
    let l = basis.site_count() as f64;
    let states = evolve_spectral(eig, &StateVector::basis(basis.dim(), index), grid)?;
    let values = states
        .iter()
        .map(|psi| {
            let overlap: f64 = psi
                .amp
                .iter()
                .zip(basis.states())
                .map(|(z, c)| z.norm_sqr() * (c.0 & initial.0).count_ones() as f64)
                .sum();
            overlap / (l * norm) - offset
        })
        .collect();
    Ok(TimeSeries::new(grid.clone(), values))
}

/// Density autocorrelator for an arbitrary normalized initial state. Each
/// `⟨ψ₀|n_i(t)n_i(0)|ψ₀⟩` is evaluated as `⟨ψ(t)|n_i|χ_i(t)⟩` with
/// `χ_i = e^{-iHt} n_i ψ₀`, taking the real part.
pub fn general_autocorrelator(
    eig: &DenseEigensystem,
    basis: &GasSectorBasis,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    if psi0.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: basis.dim(),
        });
    }
    let (norm, offset) = check_filling(basis.filling())?;
    let d = basis.dim();
    let l = basis.site_count();
    let nt = grid.len();

    // Eigenbasis coefficients of ψ₀ and of each n_iψ₀, as columns 0..=L.
    let q = eig.vectors();
    let cols = l + 1;
    let mut bre = Mat::<f64>::zeros(d, cols);
    let mut bim = Mat::<f64>::zeros(d, cols);
    for (s, z) in psi0.amp.iter().enumerate() {
        bre[(s, 0)] = z.re;
        bim[(s, 0)] = z.im;
    }
    for i in 0..l {
        for (s, occ) in basis.states().iter().enumerate() {
            if occ.is_occupied(i) {
                bre[(s, i + 1)] = psi0.amp[s].re;
                bim[(s, i + 1)] = psi0.amp[s].im;
            }
        }
    }
    let yre = q.transpose() * &bre;
    let yim = q.transpose() * &bim;

    let mut values = Vec::with_capacity(nt);
    let mut cre = Mat::<f64>::zeros(d, cols);
    let mut cim = Mat::<f64>::zeros(d, cols);
    for &t in grid.times() {
        for n in 0..d {
            let (s, c) = (eig.eigenvalues()[n] * t).sin_cos();
            for j in 0..cols {
                cre[(n, j)] = yre[(n, j)] * c + yim[(n, j)] * s;
                cim[(n, j)] = yim[(n, j)] * c - yre[(n, j)] * s;
            }
        }
        let zre = q * &cre;
        let zim = q * &cim;
        // Σ_i Re⟨ψ(t)|n_i|χ_i(t)⟩ restricted to occupied sites of each basis state.
        let mut total = 0.0;
        for i in 0..l {
            for (s, occ) in basis.states().iter().enumerate() {
                if occ.is_occupied(i) {
                    total += zre[(s, 0)] * zre[(s, i + 1)] + zim[(s, 0)] * zim[(s, i + 1)];
                }
            }
        }
        values.push(total / (l as f64 * norm) - offset);
    }
    Ok(TimeSeries::new(grid.clone(), values))
}

/// Raw, long-time and normalized dimer autocorrelators of one covering.
#[derive(Debug, Clone)]
pub struct DimerCorrelator {
    /// `c(t) = Σ_{rμ} ⟨d_{rμ}(t) d_{rμ}(0)⟩`.
    pub raw: TimeSeries,
    /// Diagonal-ensemble long-time value of the raw correlator.
    pub c_infinity: f64,
    /// `(c(t) - c∞) / (c(0) - c∞)`, going from 1 to 0.
    pub normalized: TimeSeries,
}

/// Two-time dimer correlator for a covering initial state, normalized with
/// its own diagonal-ensemble long-time value.
pub fn dimer_autocorrelator(
    eig: &DenseEigensystem,
    basis: &DimerSectorBasis,
    initial: crate::dimer::DimerConfiguration,
    grid: &TimeGrid,
) -> Result<DimerCorrelator> {
    let index = basis.index_of(initial).ok_or(Error::StateNotInSector)?;
    let observable: Vec<f64> = basis
        .states()
        .iter()
        .map(|c| (c.0 & initial.0).count_ones() as f64)
        .collect();
    let psi0 = StateVector::basis(basis.dim(), index);
    let c0 = initial.dimer_count() as f64;
    let c_infinity = diagonal_ensemble(eig, &psi0, &observable)?;
    if (c0 - c_infinity).abs() <= 1e-9 * c0.max(1.0) {
        return Err(Error::FrozenCorrelator);
    }
    let states = evolve_spectral(eig, &psi0, grid)?;
    let raw_values: Vec<f64> = states
        .iter()
        .map(|psi| psi.expect_diagonal(&observable))
        .collect();
    let normalized: Vec<f64> = raw_values
        .iter()
        .map(|&v| (v - c_infinity) / (c0 - c_infinity))
        .collect();
    Ok(DimerCorrelator {
        raw: TimeSeries::new(grid.clone(), raw_values),
        c_infinity,
        normalized: TimeSeries::new(grid.clone(), normalized),
    })
}

/// Per-time squared propagator column sums against a set of indicator
/// columns: the core of the batched all-initial-states sweeps. Returns, for
/// every grid time, the matrix M[o][s] = Σ_c P(t)[c,s]·ind_o(c) where
/// P(t)[c,s] = |⟨c|e^{-iHt}|s⟩|².
fn propagator_indicator_sums(
    eig: &DenseEigensystem,
    indicators: &Mat<f64>,
    grid: &TimeGrid,
) -> Vec<Mat<f64>> {
    let d = eig.dim();
    let q = eig.vectors();
    let qt = q.transpose().to_owned();
    let mut out = Vec::with_capacity(grid.len());
    let mut sre = Mat::<f64>::zeros(d, d);
    let mut sim = Mat::<f64>::zeros(d, d);
    for &t in grid.times() {
        for n in 0..d {
            let (s, c) = (eig.eigenvalues()[n] * t).sin_cos();
            for col in 0..d {
                sre[(n, col)] = c * qt[(n, col)];
                sim[(n, col)] = -s * qt[(n, col)];
            }
        }
        let are = q * &sre;
        let aim = q * &sim;
        let mut p = Mat::<f64>::zeros(d, d);
        for col in 0..d {
            for row in 0..d {
                let (x, y) = (are[(row, col)], aim[(row, col)]);
                p[(row, col)] = x * x + y * y;
            }
        }
        out.push(indicators.transpose() * &p);
    }
    out
}

/// Autocorrelators of every sector configuration taken as the initial state,
/// in basis order. One pass over grid times serves all states at once.
pub fn gas_all_autocorrelators(
    eig: &DenseEigensystem,
    basis: &GasSectorBasis,
    grid: &TimeGrid,
) -> Result<Vec<TimeSeries>> {
    let (norm, offset) = check_filling(basis.filling())?;
    let d = basis.dim();
    let l = basis.site_count();
    let mut indicators = Mat::<f64>::zeros(d, l);
    for (s, occ) in basis.states().iter().enumerate() {
        for i in 0..l {
            if occ.is_occupied(i) {
                indicators[(s, i)] = 1.0;
            }
        }
    }
    let sums = propagator_indicator_sums(eig, &indicators, grid);
    let mut per_state = vec![Vec::with_capacity(grid.len()); d];
    for m in &sums {
        for (s, occ) in basis.states().iter().enumerate() {
            let mut overlap = 0.0;
            for i in 0..l {
                if occ.is_occupied(i) {
                    overlap += m[(i, s)];
                }
            }
            per_state[s].push(overlap / (l as f64 * norm) - offset);
        }
    }
    Ok(per_state
        .into_iter()
        .map(|v| TimeSeries::new(grid.clone(), v))
        .collect())
}

/// Normalized dimer autocorrelators of every covering in the sector, in
/// basis order. Entries are `None` for coverings whose correlator has no
/// room to relax (frozen under the flip dynamics).
pub fn dimer_all_autocorrelators(
    eig: &DenseEigensystem,
    basis: &DimerSectorBasis,
    grid: &TimeGrid,
) -> Vec<Option<TimeSeries>> {
    let d = basis.dim();
    let n_links = basis.geometry().link_count();
    let mut indicators = Mat::<f64>::zeros(d, n_links);
    for (s, cfg) in basis.states().iter().enumerate() {
        for link in 0..n_links {
            if cfg.has_link(link) {
                indicators[(s, link)] = 1.0;
            }
        }
    }
    let sums = propagator_indicator_sums(eig, &indicators, grid);
    let c0 = basis.states()[0].dimer_count() as f64;

    // Diagonal-ensemble long-time value per initial state.
    let c_inf: Vec<f64> = (0..d)
        .map(|s| {
            let initial = basis.states()[s];
            let observable: Vec<f64> = basis
                .states()
                .iter()
                .map(|c| (c.0 & initial.0).count_ones() as f64)
                .collect();
            diagonal_ensemble(eig, &StateVector::basis(d, s), &observable)
                .expect("dimensions agree by construction")
        })
        .collect();

    let mut raw = vec![Vec::with_capacity(grid.len()); d];
    for m in &sums {
        for (s, cfg) in basis.states().iter().enumerate() {
            let mut overlap = 0.0;
            for link in 0..n_links {
                if cfg.has_link(link) {
                    overlap += m[(link, s)];
                }
            }
            raw[s].push(overlap);
        }
    }
    raw.into_iter()
        .enumerate()
        .map(|(s, values)| {
            let denom = c0 - c_inf[s];
            if denom.abs() <= 1e-9 * c0.max(1.0) {
                return None;
            }
            let normalized = values.iter().map(|&v| (v - c_inf[s]) / denom).collect();
            Some(TimeSeries::new(grid.clone(), normalized))
        })
        .collect()
}

/// Infinite-temperature average `[c(t)]` of the gas autocorrelator over all
/// sector configurations, evaluated through the spectral trace
/// `Σ_i Tr[n_i(t) n_i] / D` instead of a per-state sweep.
pub fn gas_tinf_autocorrelator(
    eig: &DenseEigensystem,
    basis: &GasSectorBasis,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let (norm, offset) = check_filling(basis.filling())?;
    let d = basis.dim();
    let l = basis.site_count();
    let q = eig.vectors();

    // W = Σ_i (Qᵀ n_i Q)∘², symmetric.
    let mut w = Mat::<f64>::zeros(d, d);
    let mut masked = Mat::<f64>::zeros(d, d);
    for i in 0..l {
        for s in 0..d {
            let on = basis.states()[s].is_occupied(i);
            for n in 0..d {
                masked[(s, n)] = if on { q[(s, n)] } else { 0.0 };
            }
        }
        let m = q.transpose() * &masked;
        for c in 0..d {
            for r in 0..d {
                let v = m[(r, c)];
                w[(r, c)] += v * v;
            }
        }
    }

    // numerator(t) = Σ_mn W_mn cos((E_m - E_n)t) = Re[zᵀ W z̄], z_n = e^{iE_n t}.
    let nt = grid.len();
    let mut zre = Mat::<f64>::zeros(d, nt);
    let mut zim = Mat::<f64>::zeros(d, nt);
    for (k, &t) in grid.times().iter().enumerate() {
        for n in 0..d {
            let (s, c) = (eig.eigenvalues()[n] * t).sin_cos();
            zre[(n, k)] = c;
            zim[(n, k)] = s;
        }
    }
    let wre = &w * &zre;
    let wim = &w * &zim;
    let values = (0..nt)
        .map(|k| {
            let mut acc = 0.0;
            for m in 0..d {
                // Re[e^{iE_m t} · conj-free combination]: W real, z̄ = (zre, -zim).
                acc += zre[(m, k)] * wre[(m, k)] + zim[(m, k)] * wim[(m, k)];
            }
            acc / (d as f64 * l as f64 * norm) - offset
        })
        .collect();
    Ok(TimeSeries::new(grid.clone(), values))
}

/// Per-site occupation expectations `⟨n_i⟩` of a sector state.
pub fn occupation_map(basis: &GasSectorBasis, psi: &StateVector) -> Vec<f64> {
    let l = basis.site_count();
    let mut map = vec![0.0; l];
    for (z, occ) in psi.amp.iter().zip(basis.states()) {
        let p = z.norm_sqr();
        let mut bits = occ.0;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            map[i] += p;
            bits &= bits - 1;
        }
    }
    map
}

/// Per-plaquette flippability expectations of a dimer sector state.
pub fn flippability_map(basis: &DimerSectorBasis, psi: &StateVector) -> Vec<f64> {
    let n_plaq = basis.geometry().site_count();
    let mut map = vec![0.0; n_plaq];
    for (s, z) in psi.amp.iter().enumerate() {
        let p = z.norm_sqr();
        for &plaq in basis.flippable(s) {
            map[plaq as usize] += p;
        }
    }
    map
}

/// Equal-time connected dimer correlations and the correlation length
/// `ξ² = Σ D²(r-r′) G_c²(r,r′) / Σ G_c²(r,r′)` with the periodic distance
/// `D²(r) = L² π⁻² Σ_j sin²(π r_j / L)`. The r = r′ terms enter exactly as
/// written: they cannot contribute to the numerator but do enter the
/// denominator.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationLength {
    pub xi: f64,
    /// Set when every connected correlation vanishes (e.g. a basis state);
    /// ξ is reported as zero in that case.
    pub degenerate: bool,
}

pub fn correlation_length(basis: &DimerSectorBasis, psi: &StateVector) -> CorrelationLength {
    let geom = basis.geometry();
    assert_eq!(geom.lx, geom.ly, "correlation length assumes a square torus");
    let lx = geom.lx;
    let n_sites = geom.site_count();
    let n_links = geom.link_count();
    let probs = psi.probabilities();

    // ⟨d_l⟩ and ⟨d_l d_l'⟩ for same-direction link pairs.
    let mut mean = vec![0.0; n_links];
    for (s, cfg) in basis.states().iter().enumerate() {
        let p = probs[s];
        let mut bits = cfg.0;
        while bits != 0 {
            let l = bits.trailing_zeros() as usize;
            mean[l] += p;
            bits &= bits - 1;
        }
    }
    let mut pair = vec![vec![0.0; n_links]; n_links];
    for (s, cfg) in basis.states().iter().enumerate() {
        let p = probs[s];
        let set: Vec<usize> = (0..n_links).filter(|&l| cfg.has_link(l)).collect();
        for &a in &set {
            for &b in &set {
                pair[a][b] += p;
            }
        }
    }

    let dist2 = |dr: usize, l: usize| -> f64 {
        let s = (std::f64::consts::PI * dr as f64 / l as f64).sin();
        s * s
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for r in 0..n_sites {
        let (rx, ry) = (r % lx, r / lx);
        for rp in 0..n_sites {
            let (px, py) = (rp % lx, rp / lx);
            let mut g = 0.0;
            for dir in 0..2 {
                let la = r * 2 + dir;
                let lb = rp * 2 + dir;
                g += pair[la][lb] - mean[la] * mean[lb];
            }
            let dx = (rx + lx - px) % lx;
            let dy = (ry + lx - py) % lx;
            let d2 = (lx * lx) as f64 / (std::f64::consts::PI * std::f64::consts::PI)
                * (dist2(dx, lx) + dist2(dy, lx));
            num += d2 * g * g;
            den += g * g;
        }
    }
    if den <= 1e-24 {
        CorrelationLength {
            xi: 0.0,
            degenerate: true,
        }
    } else {
        CorrelationLength {
            xi: (num / den).sqrt(),
            degenerate: false,
        }
    }
}

/// Projection weight of `ψ` onto the slice with the pattern outside `region`
/// frozen to `frozen_outside`: Σ_a |ψ(a, b₀)|².
pub fn projection_weight(
    basis: &GasSectorBasis,
    psi: &StateVector,
    region_mask: u64,
    frozen_outside: Occupation,
) -> f64 {
    let outside = basis.geometry().full_mask() & !region_mask;
    psi.amp
        .iter()
        .zip(basis.states())
        .filter(|(_, occ)| occ.0 & outside == frozen_outside.0)
        .map(|(z, _)| z.norm_sqr())
        .sum()
}

