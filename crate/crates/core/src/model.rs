//! Declarative description of the 1D hosting chain: coupling pattern,
//! boson-boson interaction, site window, boundary condition, and excitation
//! sources. Everything downstream (operator assembly, stripes, dynamics,
//! the Fock-space cross-check) consumes these types.
//!
//! Site labelling follows the two-sites-per-cell convention for alternating
//! chains: cell `k` holds `C_k` at raw index `2k` and `D_k` at raw index
//! `2k + 1`. Uniform chains have one site per cell, so raw index and cell
//! index coincide.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("sites {0} and {1} are not nearest neighbours")]
    NotAdjacent(i64, i64),
    #[error("site {0} lies outside the lattice window")]
    OutsideWindow(i64),
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),
}

/// Nearest-neighbour coupling layout of the hosting chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingPattern {
    /// All bonds carry the same energy `g`.
    Uniform { g: f64 },
    /// Bonds alternate between the intracell coupling `g1` (C_k - D_k) and
    /// the intercell coupling `g2` (D_k - C_{k+1}).
    Alternating { g1: f64, g2: f64 },
}

impl CouplingPattern {
    pub fn sites_per_cell(&self) -> i64 {
        match self {
            CouplingPattern::Uniform { .. } => 1,
            CouplingPattern::Alternating { .. } => 2,
        }
    }

    /// Unit cell holding a raw site index.
    pub fn cell_of(&self, site: i64) -> i64 {
        site.div_euclid(self.sites_per_cell())
    }

    /// Bond energy between two adjacent sites of the *infinite* chain.
    ///
    /// The bond type depends only on the parity of the lower site: an even
    /// lower site means the bond stays inside a cell (g1), an odd one means
    /// it crosses a cell boundary (g2).
    pub fn bond_energy(&self, site_a: i64, site_b: i64) -> f64 {
        debug_assert_eq!((site_a - site_b).abs(), 1, "bond requires adjacent sites");
        match *self {
            CouplingPattern::Uniform { g } => g,
            CouplingPattern::Alternating { g1, g2 } => {
                if site_a.min(site_b).rem_euclid(2) == 0 {
                    g1
                } else {
                    g2
                }
            }
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let ok = match *self {
            CouplingPattern::Uniform { g } => g.is_finite(),
            CouplingPattern::Alternating { g1, g2 } => g1.is_finite() && g2.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidSpec("non-finite coupling".into()))
        }
    }
}

/// Density-density interaction of strength `u` between bosons at most
/// `range` unit cells apart. `u = 0` is the non-interacting case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionSpec {
    pub u: f64,
    pub range: u32,
}

impl InteractionSpec {
    pub const NONE: InteractionSpec = InteractionSpec { u: 0.0, range: 0 };

    pub fn new(u: f64, range: u32) -> Self {
        InteractionSpec { u, range }
    }

    /// Pair energy at a given cell distance.
    pub fn at_distance(&self, cell_distance: u64) -> f64 {
        if cell_distance <= self.range as u64 {
            self.u
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// The 1D hosting lattice over a finite window of unit cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub pattern: CouplingPattern,
    pub interaction: InteractionSpec,
    pub cell_min: i64,
    pub cell_max: i64,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(
        pattern: CouplingPattern,
        interaction: InteractionSpec,
        cell_min: i64,
        cell_max: i64,
        boundary: Boundary,
    ) -> Result<Self, ModelError> {
        pattern.validate()?;
        if !interaction.u.is_finite() {
            return Err(ModelError::InvalidSpec("non-finite interaction".into()));
        }
        if cell_min > cell_max {
            return Err(ModelError::InvalidSpec(format!(
                "cell_min {cell_min} > cell_max {cell_max}"
            )));
        }
        Ok(LatticeSpec {
            pattern,
            interaction,
            cell_min,
            cell_max,
            boundary,
        })
    }

    /// Shorthand for a non-interacting uniform chain.
    pub fn uniform(g: f64, cell_min: i64, cell_max: i64, boundary: Boundary) -> Self {
        Self::new(
            CouplingPattern::Uniform { g },
            InteractionSpec::NONE,
            cell_min,
            cell_max,
            boundary,
        )
        .expect("finite couplings")
    }

    /// Shorthand for a non-interacting alternating (SSH) chain.
    pub fn ssh(g1: f64, g2: f64, cell_min: i64, cell_max: i64, boundary: Boundary) -> Self {
        Self::new(
            CouplingPattern::Alternating { g1, g2 },
            InteractionSpec::NONE,
            cell_min,
            cell_max,
            boundary,
        )
        .expect("finite couplings")
    }

    pub fn with_interaction(mut self, u: f64, range: u32) -> Self {
        self.interaction = InteractionSpec::new(u, range);
        self
    }

    pub fn n_cells(&self) -> i64 {
        self.cell_max - self.cell_min + 1
    }

    pub fn site_min(&self) -> i64 {
        self.cell_min * self.pattern.sites_per_cell()
    }

    pub fn site_max(&self) -> i64 {
        (self.cell_max + 1) * self.pattern.sites_per_cell() - 1
    }

    pub fn n_sites(&self) -> i64 {
        self.site_max() - self.site_min() + 1
    }

    pub fn contains_site(&self, site: i64) -> bool {
        site >= self.site_min() && site <= self.site_max()
    }

    pub fn cell_of(&self, site: i64) -> i64 {
        self.pattern.cell_of(site)
    }

    fn check_site(&self, site: i64) -> Result<(), ModelError> {
        if self.contains_site(site) {
            Ok(())
        } else {
            Err(ModelError::OutsideWindow(site))
        }
    }

    /// The neighbour of `site` one step in `dir` (+1/-1), with the bond
    /// energy, respecting the boundary condition. `None` means the step
    /// leaves the chain through an open end.
    pub fn neighbor(&self, site: i64, dir: i64) -> Option<(i64, f64)> {
        debug_assert!(dir == 1 || dir == -1);
        let target = site + dir;
        if self.contains_site(target) {
            return Some((target, self.pattern.bond_energy(site, target)));
        }
        match self.boundary {
            Boundary::Open => None,
            // A two-site ring would carry its one bond twice.
            Boundary::Periodic if self.n_sites() <= 2 => None,
            Boundary::Periodic => {
                let wrapped = if dir == 1 { self.site_min() } else { self.site_max() };
                // The wrap bond continues the chain pattern: its type follows
                // the parity of the last site, as if the chain repeated.
                let amp = self
                    .pattern
                    .bond_energy(self.site_max(), self.site_max() + 1);
                Some((wrapped, amp))
            }
        }
    }

    /// Coupling between two sites of the chain.
    ///
    /// `Ok(Some(energy))` for a realized bond, `Ok(None)` for the pair that
    /// would be bonded only across an open boundary, `Err` for everything
    /// else (non-adjacent pairs, sites outside the window).
    pub fn coupling_strength(&self, site_a: i64, site_b: i64) -> Result<Option<f64>, ModelError> {
        self.check_site(site_a)?;
        self.check_site(site_b)?;
        if (site_a - site_b).abs() == 1 {
            return Ok(Some(self.pattern.bond_energy(site_a, site_b)));
        }
        let wrap_pair = self.n_sites() > 2
            && site_a.min(site_b) == self.site_min()
            && site_a.max(site_b) == self.site_max();
        if wrap_pair {
            return Ok(match self.boundary {
                Boundary::Open => None,
                Boundary::Periodic => Some(
                    self.pattern
                        .bond_energy(self.site_max(), self.site_max() + 1),
                ),
            });
        }
        Err(ModelError::NotAdjacent(site_a, site_b))
    }

    /// Distance between two sites in unit cells, wrapping under Periodic.
    pub fn cell_distance(&self, site_a: i64, site_b: i64) -> u64 {
        let d = (self.cell_of(site_a) - self.cell_of(site_b)).unsigned_abs();
        match self.boundary {
            Boundary::Open => d,
            Boundary::Periodic => d.min(self.n_cells() as u64 - d),
        }
    }

    /// Interaction energy contributed by one unordered pair of bosons
    /// sitting on `site_a` and `site_b` (possibly the same site).
    pub fn pair_potential(&self, site_a: i64, site_b: i64) -> Result<f64, ModelError> {
        self.check_site(site_a)?;
        self.check_site(site_b)?;
        Ok(self
            .interaction
            .at_distance(self.cell_distance(site_a, site_b)))
    }
}

/// A multi-boson excitation: `occupancy[site] = count` bosons injected on
/// each listed site, driven by a Gaussian pulse of centre `t0`, squared
/// width `tau_sq`, carrier energy `delta_e`, and amplitude `eta0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSpec {
    pub occupancy: BTreeMap<i64, u32>,
    pub delta_e: f64,
    pub t0: f64,
    pub tau_sq: f64,
    pub eta0: f64,
}

impl ExcitationSpec {
    pub fn new(
        occupancy: impl IntoIterator<Item = (i64, u32)>,
        delta_e: f64,
        t0: f64,
        tau_sq: f64,
    ) -> Self {
        ExcitationSpec {
            occupancy: occupancy.into_iter().collect(),
            delta_e,
            t0,
            tau_sq,
            eta0: 1.0,
        }
    }

    pub fn n_bosons(&self) -> u32 {
        self.occupancy.values().sum()
    }

    /// The site multiset as a sorted list with repeats.
    pub fn site_multiset(&self) -> Vec<i64> {
        let mut sites = Vec::with_capacity(self.n_bosons() as usize);
        for (&site, &count) in &self.occupancy {
            for _ in 0..count {
                sites.push(site);
            }
        }
        sites
    }

    pub fn validate(&self, spec: &LatticeSpec, n_bosons: usize) -> Result<(), ModelError> {
        if self.occupancy.is_empty() {
            return Err(ModelError::InvalidExcitation("no target sites".into()));
        }
        for (&site, &count) in &self.occupancy {
            if count == 0 {
                return Err(ModelError::InvalidExcitation(format!(
                    "zero occupancy on site {site}"
                )));
            }
            if !spec.contains_site(site) {
                return Err(ModelError::InvalidExcitation(format!(
                    "site {site} outside the lattice window"
                )));
            }
        }
        if self.n_bosons() as usize != n_bosons {
            return Err(ModelError::InvalidExcitation(format!(
                "occupancies sum to {} but the run has {} bosons",
                self.n_bosons(),
                n_bosons
            )));
        }
        let tau_ok = self.tau_sq.is_finite() && self.tau_sq > 0.0;
        if !tau_ok {
            return Err(ModelError::InvalidExcitation("tau_sq must be positive".into()));
        }
        Ok(())
    }
}
