//! Reference initial configurations for the relaxation pipelines.
//!
//! The slow-relaxation phenomenology needs initial states with a definite
//! vacancy structure: one mobile vacancy dimer confined between two isolated
//! vacancies that act as barriers. These builders place that structure
//! deterministically for any even strip length, along with the partition
//! windows used by the metastability and heterogeneity analyses.

use crate::gas::{Occupation, SiteWindow};

/// Vacancy-dimer initial state whose roaming range exactly fills one
/// half-strip window: the two isolated vacancies sit just outside the
/// window, so the early dynamics stays inside `window` while the complement
/// keeps its initial pattern.
#[derive(Debug, Clone, Copy)]
pub struct MetastableReference {
    pub sites: usize,
    pub particles: usize,
    /// The adjacent vacancy pair.
    pub vacancy_dimer: (usize, usize),
    /// The two isolated vacancies flanking the window.
    pub barriers: (usize, usize),
    /// Half-strip window containing the dimer's whole roaming range.
    pub window: SiteWindow,
}

impl MetastableReference {
    pub fn new(sites: usize) -> Self {
        assert!(sites >= 12 && sites % 2 == 0, "needs an even strip, ≥ 12 sites");
        let len = sites / 2;
        let start = sites / 2 + 1;
        let dimer = ((start + len / 2 - 1) % sites, (start + len / 2) % sites);
        let barriers = ((start + sites - 1) % sites, (start + len) % sites);
        Self {
            sites,
            particles: sites - 4,
            vacancy_dimer: dimer,
            barriers,
            window: SiteWindow { start, len },
        }
    }

    pub fn initial_occupation(&self) -> Occupation {
        Occupation::from_vacancies(
            self.sites,
            &[
                self.vacancy_dimer.0,
                self.vacancy_dimer.1,
                self.barriers.0,
                self.barriers.1,
            ],
        )
    }

    /// Pattern outside the window (barriers vacant, all other outside sites
    /// occupied).
    pub fn frozen_outside(&self) -> Occupation {
        let mask = self.window.mask(self.sites);
        Occupation(self.initial_occupation().0 & !mask)
    }
}

/// Vacancy-dimer initial state for the sliding-window entanglement scan: the
/// barriers pin the active region inside one half-strip window so that the
/// window starting at `quiet_start` never cuts through it, while the window
/// starting at `active_start` slices it through the middle.
#[derive(Debug, Clone, Copy)]
pub struct HeterogeneityReference {
    pub sites: usize,
    pub particles: usize,
    pub vacancy_dimer: (usize, usize),
    pub barriers: (usize, usize),
    /// Window whose cuts avoid the active region.
    pub quiet_start: usize,
    /// Window with one cut through the middle of the active region.
    pub active_start: usize,
}

impl HeterogeneityReference {
    pub fn new(sites: usize) -> Self {
        assert!(sites >= 16 && sites % 2 == 0, "needs an even strip, ≥ 16 sites");
        let gap = sites / 2 - 2;
        let b = 3usize;
        let dimer = (b + 1 + (gap - 2) / 2, b + 2 + (gap - 2) / 2);
        Self {
            sites,
            particles: sites - 4,
            vacancy_dimer: dimer,
            barriers: (b, b + gap + 1),
            quiet_start: b,
            active_start: b + gap / 2 + 2,
        }
    }

    pub fn initial_occupation(&self) -> Occupation {
        Occupation::from_vacancies(
            self.sites,
            &[
                self.vacancy_dimer.0,
                self.vacancy_dimer.1,
                self.barriers.0,
                self.barriers.1,
            ],
        )
    }

    pub fn window_len(&self) -> usize {
        self.sites / 2
    }
}
