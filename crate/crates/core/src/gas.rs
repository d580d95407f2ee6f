//! Constrained quantum lattice gas on a periodic triangular strip.
//!
//! Sites sit on a two-leg triangular ladder labeled 0..L-1 along the zigzag,
//! so each site neighbors i±1 and i±2 (mod L). Hard-core particles hop along
//! bonds, but a bond is dynamically active only while at least one common
//! neighbor of its endpoints is empty: a hop and the bond's interaction
//! energy are both switched off when every common neighbor is occupied.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use crate::error::{Error, Result};
use crate::par;
use crate::sparse::SparseHermitianMatrix;

/// A bond of the strip together with the common neighbors of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    /// Endpoint sites, unordered.
    pub sites: (usize, usize),
    /// Common-neighbor sites whose joint occupation blocks the bond.
    pub common: Vec<usize>,
}

/// Periodic two-leg triangular strip with zigzag site labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripGeometry {
    l: usize,
    bonds: Vec<Bond>,
}

/// Build the strip with `l` sites. Bonds come in two families: zigzag bonds
/// (i, i+1) with common neighbors {i-1, i+2}, and leg bonds (i, i+2) with
/// common neighbor {i+1}, all mod `l`.
pub fn build_strip(l: usize) -> Result<StripGeometry> {
    if l < 6 || l % 2 != 0 {
        return Err(Error::BadStripLength(l));
    }
    let mut bonds = Vec::with_capacity(2 * l);
    for i in 0..l {
        bonds.push(Bond {
            sites: (i, (i + 1) % l),
            common: vec![(i + l - 1) % l, (i + 2) % l],
        });
        bonds.push(Bond {
            sites: (i, (i + 2) % l),
            common: vec![(i + 1) % l],
        });
    }
    Ok(StripGeometry { l, bonds })
}

impl StripGeometry {
    pub fn site_count(&self) -> usize {
        self.l
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// Full-strip occupation mask (low `l` bits set).
    pub fn full_mask(&self) -> u64 {
        (1u64 << self.l) - 1
    }

    /// Degree of each site in the bond graph.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.l];
        for b in &self.bonds {
            deg[b.sites.0] += 1;
            deg[b.sites.1] += 1;
        }
        deg
    }
}

/// Classical occupation pattern: bit i set means site i holds a particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(pub u64);

impl Occupation {
    pub fn particle_count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_occupied(self, site: usize) -> bool {
        self.0 >> site & 1 == 1
    }

    /// Occupation with particles everywhere except `vacancies`.
    pub fn from_vacancies(l: usize, vacancies: &[usize]) -> Self {
        let mut bits = (1u64 << l) - 1;
        for &v in vacancies {
            bits &= !(1u64 << v);
        }
        Occupation(bits)
    }

    /// True if some pair of vacant sites are neighbors (distance 1 or 2
    /// around the strip). States without such a pair have no allowed hops.
    pub fn has_adjacent_vacancy_pair(self, l: usize) -> bool {
        for i in 0..l {
            if self.is_occupied(i) {
                continue;
            }
            for d in [1usize, 2] {
                if !self.is_occupied((i + d) % l) {
                    return true;
                }
            }
        }
        false
    }
}

/// Constraint factor of a bond in a classical configuration: 0 when every
/// common neighbor is occupied, 1 otherwise.
pub fn constraint_value(occ: Occupation, bond: &Bond) -> u8 {
    if bond.common.iter().all(|&k| occ.is_occupied(k)) {
        0
    } else {
        1
    }
}

/// True when the bond carries exactly one particle and its constraint is
/// open, i.e. a hop across the bond is allowed.
fn bond_active(occ: Occupation, bond: &Bond) -> bool {
    occ.is_occupied(bond.sites.0) != occ.is_occupied(bond.sites.1)
        && constraint_value(occ, bond) == 1
}

fn hop_target(occ: Occupation, bond: &Bond) -> Occupation {
    Occupation(occ.0 ^ ((1u64 << bond.sites.0) | (1u64 << bond.sites.1)))
}

/// All configurations reachable from `occ` by one allowed hop.
pub fn allowed_moves(geom: &StripGeometry, occ: Occupation) -> Vec<Occupation> {
    geom.bonds()
        .iter()
        .filter(|b| bond_active(occ, b))
        .map(|b| hop_target(occ, b))
        .collect()
}

/// Outcome of the ergodic-closure audit run during sector construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureReport {
    /// Every occupation at this filling with an adjacent vacancy pair was
    /// found inside the sector.
    Complete { adjacent_pair_states: usize },
    /// Some adjacent-vacancy-pair states fall outside the BFS component.
    Incomplete {
        adjacent_pair_states: usize,
        missing: usize,
    },
    /// The audit was skipped because the full enumeration is too large.
    Skipped,
}

/// Ordered, ranked basis of one dynamically connected sector at fixed filling.
#[derive(Debug, Clone)]
pub struct GasSectorBasis {
    geometry: StripGeometry,
    n_particles: usize,
    states: Vec<Occupation>,
    rank: HashMap<u64, u32>,
    closure: ClosureReport,
}

const CLOSURE_AUDIT_CAP: u64 = 4_000_000;

/// Breadth-first closure of `seed` under allowed hops, canonically ordered by
/// ascending bit value. Errors if the seed has the wrong filling or no moves.
pub fn enumerate_sector(
    geom: &StripGeometry,
    n_particles: usize,
    seed: Occupation,
) -> Result<GasSectorBasis> {
    if n_particles > geom.site_count() {
        return Err(Error::BadFilling {
            l: geom.site_count(),
            n: n_particles,
        });
    }
    if seed.particle_count() != n_particles {
        return Err(Error::SeedFillingMismatch {
            seed: seed.0,
            expected: n_particles,
            got: seed.particle_count(),
        });
    }
    if allowed_moves(geom, seed).is_empty() {
        return Err(Error::FrozenSeed { seed: seed.0 });
    }

    let mut seen: HashMap<u64, ()> = HashMap::new();
    seen.insert(seed.0, ());
    let mut queue = VecDeque::from([seed]);
    while let Some(c) = queue.pop_front() {
        for m in allowed_moves(geom, c) {
            debug_assert_eq!(m.particle_count(), n_particles);
            if seen.insert(m.0, ()).is_none() {
                queue.push_back(m);
            }
        }
    }
    let mut states: Vec<Occupation> = seen.into_keys().map(Occupation).collect();
    states.sort_unstable();
    let rank = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.0, i as u32))
        .collect();

    let closure = audit_closure(geom, n_particles, &states);
    Ok(GasSectorBasis {
        geometry: geom.clone(),
        n_particles,
        states,
        rank,
        closure,
    })
}

/// Check whether the sector contains every same-filling occupation with an
/// adjacent vacancy pair. Enumerates vacancy placements, so the cost scales
/// with C(L, L-N); skipped above [`CLOSURE_AUDIT_CAP`].
fn audit_closure(geom: &StripGeometry, n: usize, states: &[Occupation]) -> ClosureReport {
    let l = geom.site_count();
    let holes = l - n;
    if binomial(l as u64, holes as u64) > CLOSURE_AUDIT_CAP {
        return ClosureReport::Skipped;
    }
    let member: std::collections::HashSet<u64> = states.iter().map(|s| s.0).collect();
    let mut adjacent = 0usize;
    let mut missing = 0usize;
    let mut vac = vec![0usize; holes];
    visit_combinations(l, holes, &mut vac, 0, 0, &mut |vacancies| {
        let occ = Occupation::from_vacancies(l, vacancies);
        if occ.has_adjacent_vacancy_pair(l) {
            adjacent += 1;
            if !member.contains(&occ.0) {
                missing += 1;
            }
        }
    });
    if missing == 0 {
        ClosureReport::Complete {
            adjacent_pair_states: adjacent,
        }
    } else {
        ClosureReport::Incomplete {
            adjacent_pair_states: adjacent,
            missing,
        }
    }
}

fn visit_combinations(
    l: usize,
    k: usize,
    buf: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(buf);
        return;
    }
    for s in start..l {
        buf[depth] = s;
        visit_combinations(l, k, buf, depth + 1, s + 1, f);
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

impl GasSectorBasis {
    pub fn geometry(&self) -> &StripGeometry {
        &self.geometry
    }

    pub fn site_count(&self) -> usize {
        self.geometry.site_count()
    }

    pub fn particle_count(&self) -> usize {
        self.n_particles
    }

    pub fn filling(&self) -> f64 {
        self.n_particles as f64 / self.site_count() as f64
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, occ: Occupation) -> Option<usize> {
        self.rank.get(&occ.0).map(|&i| i as usize)
    }

    pub fn closure_report(&self) -> &ClosureReport {
        &self.closure
    }

    /// Per-site occupancy indicator of each basis state, `n_i(c)`.
    pub fn occupancy_column(&self, site: usize) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| if s.is_occupied(site) { 1.0 } else { 0.0 })
            .collect()
    }

    /// Newline-delimited hexadecimal export with a `L N dimension` header.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {} {}", self.site_count(), self.n_particles, self.dim())?;
        for s in &self.states {
            writeln!(w, "{:x}", s.0)?;
        }
        Ok(())
    }
}

/// Assemble the sector Hamiltonian: off-diagonal -λ for every allowed hop,
/// diagonal +(1-λ) per active bond of the configuration.
pub fn build_gas_hamiltonian(basis: &GasSectorBasis, lambda: f64) -> Result<SparseHermitianMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::CouplingOutOfRange(lambda));
    }
    let geom = basis.geometry().clone();
    let rows = par::map_indexed(basis.dim(), |i| {
        let occ = basis.states()[i];
        let mut row: Vec<(u32, f64)> = Vec::new();
        let mut diag = 0.0;
        for bond in geom.bonds() {
            if !bond_active(occ, bond) {
                continue;
            }
            diag += 1.0 - lambda;
            let target = hop_target(occ, bond);
            debug_assert_eq!(target.particle_count(), occ.particle_count());
            let j = basis
                .index_of(target)
                .expect("sector closure violated: hop target outside basis");
            row.push((j as u32, -lambda));
        }
        if diag != 0.0 {
            row.push((i as u32, diag));
        }
        row
    });
    Ok(SparseHermitianMatrix::from_rows(rows))
}

/// Contiguous circular window of strip sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteWindow {
    pub start: usize,
    pub len: usize,
}

impl SiteWindow {
    pub fn sites(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |k| (self.start + k) % l)
    }

    pub fn mask(&self, l: usize) -> u64 {
        self.sites(l).fold(0u64, |m, s| m | 1u64 << s)
    }
}

/// Basis and Hamiltonian of the sector slice with everything outside a window
/// frozen to a fixed pattern.
#[derive(Debug, Clone)]
pub struct RestrictedSector {
    region: SiteWindow,
    region_mask: u64,
    frozen_outside: u64,
    /// Full-strip occupation masks of the slice members, in sector order.
    states: Vec<Occupation>,
    rank: HashMap<u64, u32>,
    hamiltonian: SparseHermitianMatrix,
}

impl RestrictedSector {
    pub fn region(&self) -> SiteWindow {
        self.region
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn hamiltonian(&self) -> &SparseHermitianMatrix {
        &self.hamiltonian
    }

    pub fn index_of(&self, occ: Occupation) -> Option<usize> {
        self.rank.get(&occ.0).map(|&i| i as usize)
    }

    /// Index of each slice member inside the full sector basis.
    pub fn embedding(&self, basis: &GasSectorBasis) -> Vec<usize> {
        self.states
            .iter()
            .map(|s| basis.index_of(*s).expect("slice member missing from sector"))
            .collect()
    }
}

/// Restrict the sector Hamiltonian to the slice `H_A ⊗ |b₀⟩`: keep the sector
/// states whose pattern outside `region` equals `frozen_outside`, retain hops
/// along bonds internal to the region, and keep every bond's interaction
/// energy evaluated against the frozen outside pattern. This is the
/// compression P H P onto the slice, so slice evolution approximates full
/// evolution for as long as weight stays inside the slice.
pub fn restrict_hamiltonian(
    basis: &GasSectorBasis,
    lambda: f64,
    region: SiteWindow,
    frozen_outside: Occupation,
) -> Result<RestrictedSector> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::CouplingOutOfRange(lambda));
    }
    let l = basis.site_count();
    if region.len == 0 || region.len >= l {
        return Err(Error::BadRegion);
    }
    let region_mask = region.mask(l);
    let outside_mask = basis.geometry().full_mask() & !region_mask;
    if frozen_outside.0 & region_mask != 0 {
        return Err(Error::BadRegion);
    }
    let expected_outside = frozen_outside.0.count_ones() as usize;
    let got = (frozen_outside.0 & outside_mask).count_ones() as usize;
    if got != expected_outside {
        return Err(Error::FrozenPatternMismatch {
            expected: expected_outside,
            got,
        });
    }

    let states: Vec<Occupation> = basis
        .states()
        .iter()
        .copied()
        .filter(|s| s.0 & outside_mask == frozen_outside.0)
        .collect();
    if states.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let rank: HashMap<u64, u32> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.0, i as u32))
        .collect();

    let geom = basis.geometry().clone();
    let in_region = |site: usize| region_mask >> site & 1 == 1;
    let rows: Vec<Vec<(u32, f64)>> = states
        .iter()
        .enumerate()
        .map(|(i, &occ)| {
            let mut row: Vec<(u32, f64)> = Vec::new();
            let mut diag = 0.0;
            for bond in geom.bonds() {
                if !bond_active(occ, bond) {
                    continue;
                }
                diag += 1.0 - lambda;
                if in_region(bond.sites.0) && in_region(bond.sites.1) {
                    let target = hop_target(occ, bond);
                    let j = rank
                        .get(&target.0)
                        .copied()
                        .expect("internal hop left the restricted slice");
                    row.push((j, -lambda));
                }
            }
            if diag != 0.0 {
                row.push((i as u32, diag));
            }
            row
        })
        .collect();

    Ok(RestrictedSector {
        region,
        region_mask,
        frozen_outside: frozen_outside.0,
        states,
        rank,
        hamiltonian: SparseHermitianMatrix::from_rows(rows),
    })
}

impl RestrictedSector {
    pub fn region_mask(&self) -> u64 {
        self.region_mask
    }

    pub fn frozen_outside(&self) -> Occupation {
        Occupation(self.frozen_outside)
    }
}
