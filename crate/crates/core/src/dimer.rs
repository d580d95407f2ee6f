//! Close-packed dimers on the square-lattice torus.
//!
//! Links are indexed as `(y*Lx + x)*2 + dir` with `dir` 0 for +x and 1 for
//! +y, so a configuration is a bit mask over `2*Lx*Ly` links. The kinetic
//! term rotates the two parallel dimers of a flippable plaquette; the
//! potential counts flippable plaquettes. Flips conserve the flux pair, which
//! splits the covering set into sectors.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::par;
use crate::sparse::SparseHermitianMatrix;

/// Bit mask of occupied links; bit `(y*Lx + x)*2 + dir` is the link leaving
/// site (x, y) in direction `dir` (0 → +x, 1 → +y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimerConfiguration(pub u128);

/// Integer flux pair (Φ_x, Φ_y) of a covering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluxVector {
    pub x: i32,
    pub y: i32,
}

/// Even-by-even torus dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGeometry {
    pub lx: usize,
    pub ly: usize,
}

impl TorusGeometry {
    pub fn new(lx: usize, ly: usize) -> Result<Self> {
        if lx < 2 || ly < 2 || lx % 2 != 0 || ly % 2 != 0 {
            return Err(Error::BadTorus { lx, ly });
        }
        Ok(Self { lx, ly })
    }

    pub fn site_count(&self) -> usize {
        self.lx * self.ly
    }

    pub fn link_count(&self) -> usize {
        2 * self.site_count()
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        (y % self.ly) * self.lx + (x % self.lx)
    }

    pub fn link(&self, x: usize, y: usize, dir: usize) -> usize {
        self.site(x, y) * 2 + dir
    }

    /// The four links incident to a site, in a fixed order: +x, +y from the
    /// site itself, then the +x link of the left neighbor and the +y link of
    /// the lower neighbor.
    pub fn incident_links(&self, x: usize, y: usize) -> [usize; 4] {
        [
            self.link(x, y, 0),
            self.link(x, y, 1),
            self.link(x + self.lx - 1, y, 0),
            self.link(x, y + self.ly - 1, 1),
        ]
    }

    /// Site reached by following `link` away from site (x, y).
    pub fn link_partner(&self, x: usize, y: usize, link: usize) -> usize {
        let s = link / 2;
        let dir = link % 2;
        let (sx, sy) = (s % self.lx, s / self.lx);
        let (ox, oy) = if dir == 0 {
            ((sx + 1) % self.lx, sy)
        } else {
            (sx, (sy + 1) % self.ly)
        };
        let this = self.site(x, y);
        if self.site(sx, sy) == this {
            self.site(ox, oy)
        } else {
            self.site(sx, sy)
        }
    }

    /// Links of plaquette p (corner site at (x, y)): the two horizontal links
    /// forming an h-pair and the two vertical links forming a v-pair.
    pub fn plaquette_links(&self, p: usize) -> PlaquetteLinks {
        let x = p % self.lx;
        let y = p / self.lx;
        PlaquetteLinks {
            h: [self.link(x, y, 0), self.link(x, y + 1, 0)],
            v: [self.link(x, y, 1), self.link(x + 1, y, 1)],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlaquetteLinks {
    pub h: [usize; 2],
    pub v: [usize; 2],
}

impl DimerConfiguration {
    pub fn has_link(self, link: usize) -> bool {
        self.0 >> link & 1 == 1
    }

    pub fn dimer_count(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Close packing: every site is covered by exactly one dimer.
    pub fn is_close_packed(self, geom: &TorusGeometry) -> bool {
        for y in 0..geom.ly {
            for x in 0..geom.lx {
                let covered: u32 = geom
                    .incident_links(x, y)
                    .iter()
                    .map(|&l| (self.0 >> l & 1) as u32)
                    .sum();
                if covered != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Link-bit string, link 0 leftmost.
    pub fn bit_string(self, geom: &TorusGeometry) -> String {
        (0..geom.link_count())
            .map(|l| if self.has_link(l) { '1' } else { '0' })
            .collect()
    }
}

/// Exhaustively enumerate close-packed coverings by matching the first
/// uncovered site in raster order against each free neighbor. The ordering is
/// deterministic: configurations appear in the order the backtracking visits
/// them.
pub fn enumerate_coverings(geom: &TorusGeometry) -> Vec<DimerConfiguration> {
    let n = geom.site_count();
    let mut incident: Vec<[usize; 4]> = Vec::with_capacity(n);
    for y in 0..geom.ly {
        for x in 0..geom.lx {
            incident.push(geom.incident_links(x, y));
        }
    }
    let mut partner: HashMap<(usize, usize), usize> = HashMap::new();
    for y in 0..geom.ly {
        for x in 0..geom.lx {
            let s = geom.site(x, y);
            for &l in &incident[s] {
                partner.insert((s, l), geom.link_partner(x, y, l));
            }
        }
    }
    let mut out = Vec::new();
    let mut covered = vec![false; n];
    let mut mask: u128 = 0;
    backtrack(&incident, &partner, &mut covered, &mut mask, &mut out);
    debug_assert!(out.iter().all(|c| c.is_close_packed(geom)));
    out
}

fn backtrack(
    incident: &[[usize; 4]],
    partner: &HashMap<(usize, usize), usize>,
    covered: &mut [bool],
    mask: &mut u128,
    out: &mut Vec<DimerConfiguration>,
) {
    let s = match covered.iter().position(|&c| !c) {
        Some(s) => s,
        None => {
            out.push(DimerConfiguration(*mask));
            return;
        }
    };
    for &l in &incident[s] {
        if *mask >> l & 1 == 1 {
            continue;
        }
        let o = partner[&(s, l)];
        if o == s || covered[o] {
            continue;
        }
        covered[s] = true;
        covered[o] = true;
        *mask |= 1u128 << l;
        backtrack(incident, partner, covered, mask, out);
        *mask &= !(1u128 << l);
        covered[s] = false;
        covered[o] = false;
    }
}

/// Staggered sublattice sign (-1)^(x+y) of the site a link leaves from.
fn link_sign(geom: &TorusGeometry, link: usize) -> i64 {
    let s = link / 2;
    let x = s % geom.lx;
    let y = s / geom.lx;
    if (x + y) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Flux Φ_μ = (1/L_μ) Σ_r (-1)^(r_x+r_y) d_{rμ}, evaluated exactly. Errors if
/// either component fails to be an integer.
pub fn flux_of(geom: &TorusGeometry, cfg: DimerConfiguration) -> Result<FluxVector> {
    let mut sx: i64 = 0;
    let mut sy: i64 = 0;
    for l in 0..geom.link_count() {
        if cfg.has_link(l) {
            let sgn = link_sign(geom, l);
            if l % 2 == 0 {
                sx += sgn;
            } else {
                sy += sgn;
            }
        }
    }
    if sx % geom.lx as i64 != 0 || sy % geom.ly as i64 != 0 {
        return Err(Error::FractionalFlux);
    }
    Ok(FluxVector {
        x: (sx / geom.lx as i64) as i32,
        y: (sy / geom.ly as i64) as i32,
    })
}

/// If plaquette `p` is flippable in `cfg`, return the flipped configuration.
pub fn flip_plaquette(
    geom: &TorusGeometry,
    cfg: DimerConfiguration,
    p: usize,
) -> Option<DimerConfiguration> {
    let pl = geom.plaquette_links(p);
    let h_mask = (1u128 << pl.h[0]) | (1u128 << pl.h[1]);
    let v_mask = (1u128 << pl.v[0]) | (1u128 << pl.v[1]);
    if cfg.0 & h_mask == h_mask {
        Some(DimerConfiguration((cfg.0 & !h_mask) | v_mask))
    } else if cfg.0 & v_mask == v_mask {
        Some(DimerConfiguration((cfg.0 & !v_mask) | h_mask))
    } else {
        None
    }
}

/// Plaquettes carrying two parallel dimers.
pub fn flippable_plaquettes(geom: &TorusGeometry, cfg: DimerConfiguration) -> Vec<u16> {
    (0..geom.site_count() as u16)
        .filter(|&p| flip_plaquette(geom, cfg, p as usize).is_some())
        .collect()
}

/// Ordered, ranked basis of one flux sector with cached flippable plaquettes
/// and the decomposition of its flip graph into connected components.
#[derive(Debug, Clone)]
pub struct DimerSectorBasis {
    geometry: TorusGeometry,
    flux: FluxVector,
    states: Vec<DimerConfiguration>,
    rank: HashMap<u128, u32>,
    flippable: Vec<Vec<u16>>,
    component_of: Vec<u32>,
    component_sizes: Vec<usize>,
}

/// Filter coverings by flux, cache flippability, verify flip closure and
/// record the flip-graph components.
pub fn build_flux_sector(
    geom: &TorusGeometry,
    coverings: &[DimerConfiguration],
    flux: FluxVector,
) -> Result<DimerSectorBasis> {
    let states: Vec<DimerConfiguration> = coverings
        .iter()
        .copied()
        .filter(|&c| flux_of(geom, c).map(|f| f == flux).unwrap_or(false))
        .collect();
    if states.is_empty() {
        return Err(Error::EmptyFluxSector {
            fx: flux.x,
            fy: flux.y,
        });
    }
    let rank: HashMap<u128, u32> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.0, i as u32))
        .collect();
    let flippable: Vec<Vec<u16>> =
        par::map_slice(&states, |&c| flippable_plaquettes(geom, c));

    // Flip closure: every flip of a member lands on a member (flux is
    // conserved by construction, so a miss means the covering list was
    // incomplete).
    for (i, &c) in states.iter().enumerate() {
        for &p in &flippable[i] {
            let t = flip_plaquette(geom, c, p as usize).expect("cached plaquette must flip");
            assert!(
                rank.contains_key(&t.0),
                "flip closure violated: target of plaquette {p} missing from sector"
            );
        }
    }

    // Connected components of the flip graph.
    let mut component_of = vec![u32::MAX; states.len()];
    let mut component_sizes = Vec::new();
    for start in 0..states.len() {
        if component_of[start] != u32::MAX {
            continue;
        }
        let comp = component_sizes.len() as u32;
        let mut size = 0usize;
        let mut stack = vec![start];
        component_of[start] = comp;
        while let Some(i) = stack.pop() {
            size += 1;
            for &p in &flippable[i] {
                let t = flip_plaquette(geom, states[i], p as usize).unwrap();
                let j = rank[&t.0] as usize;
                if component_of[j] == u32::MAX {
                    component_of[j] = comp;
                    stack.push(j);
                }
            }
        }
        component_sizes.push(size);
    }

    Ok(DimerSectorBasis {
        geometry: *geom,
        flux,
        states,
        rank,
        flippable,
        component_of,
        component_sizes,
    })
}

impl DimerSectorBasis {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geometry
    }

    pub fn flux(&self) -> FluxVector {
        self.flux
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[DimerConfiguration] {
        &self.states
    }

    pub fn index_of(&self, cfg: DimerConfiguration) -> Option<usize> {
        self.rank.get(&cfg.0).map(|&i| i as usize)
    }

    pub fn flippable(&self, index: usize) -> &[u16] {
        &self.flippable[index]
    }

    pub fn is_flip_connected(&self) -> bool {
        self.component_sizes.len() == 1
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.component_sizes
    }

    pub fn component_of(&self, index: usize) -> usize {
        self.component_of[index] as usize
    }

    /// Members of one flip component, as basis indices.
    pub fn component_members(&self, comp: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.component_of[i] as usize == comp)
            .collect()
    }

    /// Per-link occupancy indicator of each basis state.
    pub fn link_column(&self, link: usize) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| if s.has_link(link) { 1.0 } else { 0.0 })
            .collect()
    }

    /// Link-bit-string export with a `Lx Ly flux_x flux_y dimension` header.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "{} {} {} {} {}",
            self.geometry.lx,
            self.geometry.ly,
            self.flux.x,
            self.flux.y,
            self.dim()
        )?;
        for s in &self.states {
            writeln!(w, "{}", s.bit_string(&self.geometry))?;
        }
        Ok(())
    }
}

/// Assemble the sector Hamiltonian: off-diagonal -1 between configurations
/// related by one plaquette flip, diagonal +V per flippable plaquette.
pub fn build_qdm_hamiltonian(basis: &DimerSectorBasis, v: f64) -> SparseHermitianMatrix {
    let geom = *basis.geometry();
    let rows = par::map_indexed(basis.dim(), |i| {
        let cfg = basis.states()[i];
        let mut row: Vec<(u32, f64)> = Vec::new();
        let mut diag = 0.0;
        for &p in basis.flippable(i) {
            diag += v;
            let t = flip_plaquette(&geom, cfg, p as usize).unwrap();
            let j = basis.index_of(t).expect("flip closure verified at build");
            debug_assert_eq!(
                flux_of(&geom, t).unwrap(),
                basis.flux(),
                "flip changed the flux"
            );
            row.push((j as u32, -1.0));
        }
        if diag != 0.0 {
            row.push((i as u32, diag));
        }
        row
    });
    SparseHermitianMatrix::from_rows(rows)
}

/// The columnar covering: all dimers horizontal, anchored on even columns.
pub fn columnar_covering(geom: &TorusGeometry) -> DimerConfiguration {
    let mut mask = 0u128;
    for y in 0..geom.ly {
        for x in (0..geom.lx).step_by(2) {
            mask |= 1u128 << geom.link(x, y, 0);
        }
    }
    DimerConfiguration(mask)
}

/// The staggered covering: horizontal dimers anchored on the even sublattice.
/// It has no flippable plaquettes and extremal flux (L/2, 0).
pub fn staggered_covering(geom: &TorusGeometry) -> DimerConfiguration {
    let mut mask = 0u128;
    for y in 0..geom.ly {
        for x in 0..geom.lx {
            if (x + y) % 2 == 0 {
                mask |= 1u128 << geom.link(x, y, 0);
            }
        }
    }
    DimerConfiguration(mask)
}
