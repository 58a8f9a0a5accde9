//! Analytic band formulas and projected band structures for stripe
//! geometries of the synthetic lattice.
//!
//! A stripe is infinite along one translation direction and bounded along
//! the remaining transverse coordinate(s). Two translation choices cover
//! the physics here:
//!
//! - `Axis`: translation by one unit cell along the first synthetic axis;
//!   the other axes are bounded in unit-cell windows.
//! - `Diagonal`: translation by one unit cell along every axis at once (the
//!   centre-of-mass direction). Transverse coordinates are the relative
//!   cell offsets l_i = cell(axis i+1) - cell(axis 1), which the diagonal
//!   translation preserves, so a diagonal interaction potential never
//!   breaks the stripe symmetry.
//!
//! The Bloch matrix at longitudinal momentum k_j is assembled by
//! decomposing every single-coordinate hop into an integer number q of
//! translations plus a transverse remainder; the hop contributes its bond
//! energy times exp(i q k_j). Hops leaving the transverse window are
//! dropped (open transverse boundary).

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{CouplingPattern, InteractionSpec};
use crate::spectra::{self, EigenPair, SpectraError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlochError {
    #[error("unsupported stripe geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("translation symmetry broken: {0}")]
    BrokenTranslation(String),
    #[error("hop spans {q} supercells; the longitudinal period is too small")]
    SupercellTooSmall { q: i64 },
    #[error("k = {0} outside the first Brillouin zone [-pi, pi]")]
    KOutOfRange(f64),
    #[error(transparent)]
    Eig(#[from] SpectraError),
}

/// N-boson tight-binding dispersion: 2g sum_i cos(k_i).
pub fn analytic_band_tb(k: &[f64], g: f64) -> f64 {
    2.0 * g * k.iter().map(|&ki| ki.cos()).sum::<f64>()
}

/// The two 1D SSH bands at momentum k (cell units).
pub fn ssh1d_bands(k: f64, g1: f64, g2: f64) -> [f64; 2] {
    let e = (g1 * g1 + g2 * g2 + 2.0 * g1 * g2 * k.cos()).sqrt();
    [-e, e]
}

/// The four 2D SSH bands: every sign combination of the two 1D roots,
/// ascending.
pub fn analytic_band_ssh2d(k_m: f64, k_n: f64, g1: f64, g2: f64) -> [f64; 4] {
    let em = ssh1d_bands(k_m, g1, g2)[1];
    let en = ssh1d_bands(k_n, g1, g2)[1];
    let mut out = [-em - en, -em + en, em - en, em + en];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// 1x1 Bloch matrix of the N-dimensional tight-binding synthetic lattice,
/// assembled from its 2N hop phases (an independent route to
/// [`analytic_band_tb`]).
pub fn bulk_bloch_tb(k: &[f64], g: f64) -> DMatrix<C64> {
    let mut entry = C64::new(0.0, 0.0);
    for &ki in k {
        entry += C64::new(ki.cos(), ki.sin()) * g;
        entry += C64::new(ki.cos(), -ki.sin()) * g;
    }
    DMatrix::from_element(1, 1, entry)
}

/// 2x2 Bloch matrix of the 1D SSH chain.
pub fn ssh1d_bloch(k: f64, g1: f64, g2: f64) -> DMatrix<C64> {
    let off = C64::new(g1 + g2 * k.cos(), -g2 * k.sin());
    DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), off, off.conj(), C64::new(0.0, 0.0)])
}

/// 4x4 Bloch matrix of the two-boson SSH synthetic lattice,
/// h(k_m) (x) I + I (x) h(k_n).
pub fn bulk_bloch_ssh2d(k_m: f64, k_n: f64, g1: f64, g2: f64) -> DMatrix<C64> {
    let hm = ssh1d_bloch(k_m, g1, g2);
    let hn = ssh1d_bloch(k_n, g1, g2);
    let eye = DMatrix::<C64>::identity(2, 2);
    hm.kronecker(&eye) + eye.kronecker(&hn)
}

/// Inclusive range of transverse unit cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRange {
    pub lo: i64,
    pub hi: i64,
}

impl CellRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty cell range");
        CellRange { lo, hi }
    }

    pub fn contains(&self, cell: i64) -> bool {
        cell >= self.lo && cell <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StripeKind {
    /// Translation along the first synthetic axis; remaining axes bounded.
    Axis { transverse: Vec<CellRange> },
    /// Translation along the cell diagonal; transverse coordinates are the
    /// relative cell offsets of axes 2..N against axis 1.
    Diagonal { transverse: Vec<CellRange> },
}

impl StripeKind {
    fn transverse(&self) -> &[CellRange] {
        match self {
            StripeKind::Axis { transverse } => transverse,
            StripeKind::Diagonal { transverse } => transverse,
        }
    }
}

/// One supercell site: a representative absolute tuple (longitudinal
/// coordinate in cell 0) and its transverse cell coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct StripeSite {
    pub repr: Vec<i64>,
    pub transverse: Vec<i64>,
}

/// A quasi-1D cut of the synthetic lattice with one translation direction.
#[derive(Debug, Clone)]
pub struct StripeGeometry {
    pattern: CouplingPattern,
    interaction: InteractionSpec,
    n_bosons: usize,
    kind: StripeKind,
    sites: Vec<StripeSite>,
    index: HashMap<Vec<i64>, usize>,
}

impl StripeGeometry {
    pub fn axis(
        pattern: CouplingPattern,
        interaction: InteractionSpec,
        transverse: Vec<CellRange>,
    ) -> Result<Self, BlochError> {
        Self::new(pattern, interaction, StripeKind::Axis { transverse })
    }

    pub fn diagonal(
        pattern: CouplingPattern,
        interaction: InteractionSpec,
        transverse: Vec<CellRange>,
    ) -> Result<Self, BlochError> {
        Self::new(pattern, interaction, StripeKind::Diagonal { transverse })
    }

    pub fn new(
        pattern: CouplingPattern,
        interaction: InteractionSpec,
        kind: StripeKind,
    ) -> Result<Self, BlochError> {
        let n_bosons = kind.transverse().len() + 1;
        let p = pattern.sites_per_cell();

        let mut sites = Vec::new();
        let mut repr = vec![0i64; n_bosons];
        // Odometer over (sublattice of axis 0) x (raw sites of each
        // transverse axis window).
        fn fill(
            axis: usize,
            n: usize,
            p: i64,
            transverse: &[CellRange],
            repr: &mut Vec<i64>,
            sites: &mut Vec<StripeSite>,
            pattern: &CouplingPattern,
        ) {
            if axis == n {
                let transverse_coords = repr[1..]
                    .iter()
                    .map(|&raw| pattern.cell_of(raw) - pattern.cell_of(repr[0]))
                    .collect();
                sites.push(StripeSite {
                    repr: repr.clone(),
                    transverse: transverse_coords,
                });
                return;
            }
            if axis == 0 {
                for s in 0..p {
                    repr[0] = s;
                    fill(1, n, p, transverse, repr, sites, pattern);
                }
            } else {
                let range = transverse[axis - 1];
                for cell in range.lo..=range.hi {
                    for s in 0..p {
                        repr[axis] = cell * p + s;
                        fill(axis + 1, n, p, transverse, repr, sites, pattern);
                    }
                }
            }
        }
        fill(0, n_bosons, p, kind.transverse(), &mut repr, &mut sites, &pattern);

        // Axis stripes index transverse coordinates by absolute cell, not
        // by offset against axis 0.
        if let StripeKind::Axis { .. } = kind {
            for site in &mut sites {
                for (t, &raw) in site.transverse.iter_mut().zip(&site.repr[1..]) {
                    *t = pattern.cell_of(raw);
                }
            }
        }

        let index = sites
            .iter()
            .enumerate()
            .map(|(i, s)| (s.repr.clone(), i))
            .collect();

        let geom = StripeGeometry {
            pattern,
            interaction,
            n_bosons,
            kind,
            sites,
            index,
        };
        geom.check_translation()?;
        Ok(geom)
    }

    pub fn kind(&self) -> &StripeKind {
        &self.kind
    }

    pub fn n_bosons(&self) -> usize {
        self.n_bosons
    }

    pub fn pattern(&self) -> &CouplingPattern {
        &self.pattern
    }

    pub fn interaction(&self) -> &InteractionSpec {
        &self.interaction
    }

    pub fn sites(&self) -> &[StripeSite] {
        &self.sites
    }

    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn transverse_ranges(&self) -> &[CellRange] {
        self.kind.transverse()
    }

    /// Interaction energy of an absolute configuration on the infinite
    /// chain: U per boson pair within range, distances in unit cells.
    pub fn potential(&self, x: &[i64]) -> f64 {
        let mut total = 0.0;
        for (i, &a) in x.iter().enumerate() {
            for &b in &x[i + 1..] {
                let d = (self.pattern.cell_of(a) - self.pattern.cell_of(b)).unsigned_abs();
                total += self.interaction.at_distance(d);
            }
        }
        total
    }

    fn check_translation(&self) -> Result<(), BlochError> {
        if matches!(self.kind, StripeKind::Axis { .. })
            && self.interaction.u != 0.0
            && self.n_bosons >= 2
        {
            // A finite-range pair potential depends on the distance to the
            // bounded axes, which an axis-aligned translation changes.
            return Err(BlochError::BrokenTranslation(
                "axis-aligned stripes require U = 0".into(),
            ));
        }
        let shift = self.translation();
        for site in &self.sites {
            let shifted: Vec<i64> = site.repr.iter().zip(&shift).map(|(x, t)| x + t).collect();
            if self.potential(&site.repr) != self.potential(&shifted) {
                return Err(BlochError::BrokenTranslation(format!(
                    "potential at {:?} changes under translation",
                    site.repr
                )));
            }
        }
        Ok(())
    }

    /// Raw-index displacement of one translation period.
    fn translation(&self) -> Vec<i64> {
        let p = self.pattern.sites_per_cell();
        match self.kind {
            StripeKind::Axis { .. } => {
                let mut t = vec![0i64; self.n_bosons];
                t[0] = p;
                t
            }
            StripeKind::Diagonal { .. } => vec![p; self.n_bosons],
        }
    }

    /// Map an absolute tuple onto (supercell site, translation count), or
    /// `None` when the tuple leaves the transverse window.
    pub fn reduce(&self, x: &[i64]) -> Option<(usize, i64)> {
        debug_assert_eq!(x.len(), self.n_bosons);
        let p = self.pattern.sites_per_cell();
        let q = x[0].div_euclid(p);
        let rep: Vec<i64> = match self.kind {
            StripeKind::Axis { .. } => {
                let mut rep = x.to_vec();
                rep[0] = x[0].rem_euclid(p);
                rep
            }
            StripeKind::Diagonal { .. } => x.iter().map(|&xi| xi - q * p).collect(),
        };
        for (i, range) in self.kind.transverse().iter().enumerate() {
            if !range.contains(self.pattern.cell_of(rep[i + 1])) {
                return None;
            }
        }
        let idx = *self
            .index
            .get(&rep)
            .expect("in-window representative is enumerated");
        Some((idx, q))
    }

    /// Bloch matrix of the stripe at longitudinal momentum `k_j`.
    pub fn build_bloch(&self, k_j: f64) -> Result<DMatrix<C64>, BlochError> {
        if !(-PI - 1e-12..=PI + 1e-12).contains(&k_j) {
            return Err(BlochError::KOutOfRange(k_j));
        }
        let n = self.dim();
        let mut h = DMatrix::<C64>::zeros(n, n);
        let mut x = Vec::with_capacity(self.n_bosons);
        for (c, site) in self.sites.iter().enumerate() {
            h[(c, c)] += C64::new(self.potential(&site.repr), 0.0);
            for axis in 0..self.n_bosons {
                for dir in [-1i64, 1] {
                    x.clear();
                    x.extend_from_slice(&site.repr);
                    x[axis] += dir;
                    let amp = self.pattern.bond_energy(site.repr[axis], x[axis]);
                    if let Some((r, q)) = self.reduce(&x) {
                        if q.abs() > 1 {
                            return Err(BlochError::SupercellTooSmall { q });
                        }
                        let phase = q as f64 * k_j;
                        h[(r, c)] += C64::new(phase.cos(), phase.sin()) * amp;
                    }
                }
            }
        }
        Ok(h)
    }

    /// Eigenvalues (and optionally eigenvectors) over a uniform k grid.
    pub fn projected_bands(
        &self,
        k_count: usize,
        keep_eigvecs: bool,
    ) -> Result<BandStructure, BlochError> {
        let k_grid = k_grid(k_count);
        let per_k: Result<Vec<_>, BlochError> = k_grid
            .par_iter()
            .map(|&k| {
                let h = self.build_bloch(k)?;
                let pairs = spectra::hermitian_eig(&h)?;
                let energies: Vec<f64> = pairs.iter().map(|p| p.energy).collect();
                let vecs = keep_eigvecs.then(|| {
                    let mut m = DMatrix::<C64>::zeros(h.nrows(), h.ncols());
                    for (j, p) in pairs.iter().enumerate() {
                        m.set_column(j, &p.vector);
                    }
                    m
                });
                Ok((energies, vecs))
            })
            .collect();
        let per_k = per_k?;
        let mut energies = Vec::with_capacity(per_k.len());
        let mut eigvecs = keep_eigvecs.then(Vec::new);
        for (e, v) in per_k {
            energies.push(e);
            if let (Some(store), Some(v)) = (eigvecs.as_mut(), v) {
                store.push(v);
            }
        }
        Ok(BandStructure {
            k_grid,
            energies,
            eigvecs,
        })
    }

    /// The permutation-with-winding map of the boson exchange reflection:
    /// entry i holds (j, q) with (Pv)[i] = exp(i q k_j) v[j]. Defined for
    /// diagonal stripes only: N = 2 exchanges the two bosons, N = 3
    /// exchanges bosons 2 and 3 (l1 <-> l2).
    pub fn exchange_reflection(&self) -> Result<Vec<(usize, i64)>, BlochError> {
        let StripeKind::Diagonal { .. } = self.kind else {
            return Err(BlochError::UnsupportedGeometry(
                "exchange reflection is defined for diagonal stripes".into(),
            ));
        };
        let (a, b) = match self.n_bosons {
            2 => (0usize, 1usize),
            3 => (1usize, 2usize),
            n => {
                return Err(BlochError::UnsupportedGeometry(format!(
                    "no exchange reflection implemented for {n} bosons"
                )))
            }
        };
        let mut map = Vec::with_capacity(self.dim());
        for site in &self.sites {
            let mut swapped = site.repr.clone();
            swapped.swap(a, b);
            let Some((j, q)) = self.reduce(&swapped) else {
                return Err(BlochError::UnsupportedGeometry(
                    "transverse window is not symmetric under the exchange".into(),
                ));
            };
            map.push((j, q));
        }
        Ok(map)
    }
}

/// Uniform k grid over [-pi, pi]; a single point sits at k = 0.
pub fn k_grid(k_count: usize) -> Vec<f64> {
    assert!(k_count >= 1);
    if k_count == 1 {
        return vec![0.0];
    }
    (0..k_count)
        .map(|i| -PI + 2.0 * PI * i as f64 / (k_count - 1) as f64)
        .collect()
}

/// k-resolved spectrum of a stripe: energies ascending per k point,
/// eigenvector columns in matching order when retained.
#[derive(Debug, Clone)]
pub struct BandStructure {
    pub k_grid: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
    pub eigvecs: Option<Vec<DMatrix<C64>>>,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    /// Eigenpairs at one k index; `None` when eigenvectors were not kept.
    pub fn pairs_at(&self, k_index: usize) -> Option<Vec<EigenPair>> {
        let vecs = self.eigvecs.as_ref()?;
        Some(
            self.energies[k_index]
                .iter()
                .enumerate()
                .map(|(j, &energy)| EigenPair {
                    energy,
                    vector: vecs[k_index].column(j).into_owned(),
                })
                .collect(),
        )
    }
}

/// Projected bulk reference for an axis-aligned two-boson stripe: at each
/// longitudinal k, the union of bulk band energies over a uniform sample of
/// the transverse momentum. U must be 0 (bulk bands are analytic only
/// there).
pub fn bulk_reference_axis(
    pattern: &CouplingPattern,
    k_grid: &[f64],
    samples: usize,
) -> BandStructure {
    let energies = k_grid
        .iter()
        .map(|&km| {
            let mut e = Vec::with_capacity(4 * samples);
            for s in 0..samples {
                let kn = -PI + 2.0 * PI * s as f64 / samples as f64;
                match *pattern {
                    CouplingPattern::Uniform { g } => e.push(analytic_band_tb(&[km, kn], g)),
                    CouplingPattern::Alternating { g1, g2 } => {
                        e.extend(analytic_band_ssh2d(km, kn, g1, g2))
                    }
                }
            }
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            e
        })
        .collect();
    BandStructure {
        k_grid: k_grid.to_vec(),
        energies,
        eigvecs: None,
    }
}

/// Projected bulk reference for a diagonal stripe at U = 0: the union of
/// bulk bands over the momentum line k_1 + ... + k_N = k_j.
pub fn bulk_reference_diagonal(
    pattern: &CouplingPattern,
    n_bosons: usize,
    k_grid: &[f64],
    samples: usize,
) -> Result<BandStructure, BlochError> {
    let energies: Result<Vec<Vec<f64>>, BlochError> = k_grid
        .iter()
        .map(|&kj| {
            let mut e = Vec::new();
            match (n_bosons, pattern) {
                (2, CouplingPattern::Uniform { g }) => {
                    for s in 0..samples {
                        let km = -PI + 2.0 * PI * s as f64 / samples as f64;
                        e.push(analytic_band_tb(&[km, kj - km], *g));
                    }
                }
                (2, CouplingPattern::Alternating { g1, g2 }) => {
                    for s in 0..samples {
                        let km = -PI + 2.0 * PI * s as f64 / samples as f64;
                        e.extend(analytic_band_ssh2d(km, kj - km, *g1, *g2));
                    }
                }
                (3, CouplingPattern::Uniform { g }) => {
                    for sa in 0..samples {
                        let ka = -PI + 2.0 * PI * sa as f64 / samples as f64;
                        for sb in 0..samples {
                            let kb = -PI + 2.0 * PI * sb as f64 / samples as f64;
                            e.push(analytic_band_tb(&[ka, kb, kj - ka - kb], *g));
                        }
                    }
                }
                _ => {
                    return Err(BlochError::UnsupportedGeometry(
                        "bulk reference: N = 2 (any pattern) or N = 3 (uniform)".into(),
                    ))
                }
            }
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(e)
        })
        .collect();
    Ok(BandStructure {
        k_grid: k_grid.to_vec(),
        energies: energies?,
        eigvecs: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Boundary, LatticeSpec};
    use crate::synth::SyntheticOperator;
    use approx::assert_abs_diff_eq;

    #[test]
    fn analytic_tb_band_values() {
        assert_abs_diff_eq!(analytic_band_tb(&[0.0, 0.0], 1.0), 4.0);
        assert_abs_diff_eq!(analytic_band_tb(&[0.0, 0.0, 0.0], 1.0), 6.0);
        assert_abs_diff_eq!(analytic_band_tb(&[PI, PI, PI], 1.0), -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            analytic_band_tb(&[PI / 2.0, PI / 2.0], 1.0),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn analytic_ssh2d_band_values() {
        let bands = analytic_band_ssh2d(PI, PI, 3.0, 1.0);
        for (b, expect) in bands.iter().zip(&[-4.0, 0.0, 0.0, 4.0]) {
            assert_abs_diff_eq!(b, expect, epsilon = 1e-12);
        }
        let bands = analytic_band_ssh2d(0.0, 0.0, 3.0, 1.0);
        for (b, expect) in bands.iter().zip(&[-8.0, 0.0, 0.0, 8.0]) {
            assert_abs_diff_eq!(b, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn ssh2d_is_sum_of_1d_bands() {
        let (g1, g2) = (1.7, 0.4);
        for (km, kn) in [(0.3, -1.2), (2.8, 0.9), (-0.4, -2.2)] {
            let bands = analytic_band_ssh2d(km, kn, g1, g2);
            let em = ssh1d_bands(km, g1, g2);
            let en = ssh1d_bands(kn, g1, g2);
            let mut sums: Vec<f64> = em
                .iter()
                .flat_map(|a| en.iter().map(move |b| a + b))
                .collect();
            sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (b, s) in bands.iter().zip(&sums) {
                assert_abs_diff_eq!(b, s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bulk_bloch_matrices_match_formulas() {
        let ks = [(0.37, -2.11), (1.9, 0.02), (-3.0, 2.4)];
        for (km, kn) in ks {
            let m = bulk_bloch_tb(&[km, kn], 1.3);
            assert_abs_diff_eq!(m[(0, 0)].im, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(m[(0, 0)].re, analytic_band_tb(&[km, kn], 1.3), epsilon = 1e-12);

            let h = bulk_bloch_ssh2d(km, kn, 3.0, 1.0);
            let pairs = spectra::hermitian_eig(&h).unwrap();
            let expect = analytic_band_ssh2d(km, kn, 3.0, 1.0);
            for (p, e) in pairs.iter().zip(&expect) {
                assert_abs_diff_eq!(p.energy, e, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn single_axis_ssh_stripe_reproduces_1d_bands() {
        let geom = StripeGeometry::axis(
            CouplingPattern::Alternating { g1: 3.0, g2: 1.0 },
            InteractionSpec::NONE,
            vec![],
        )
        .unwrap();
        assert_eq!(geom.dim(), 2);
        let bands = geom.projected_bands(21, false).unwrap();
        for (ki, &k) in bands.k_grid.iter().enumerate() {
            let expect = ssh1d_bands(k, 3.0, 1.0);
            assert_abs_diff_eq!(bands.energies[ki][0], expect[0], epsilon = 1e-10);
            assert_abs_diff_eq!(bands.energies[ki][1], expect[1], epsilon = 1e-10);
        }
    }

    #[test]
    fn stripe_bloch_is_hermitian() {
        let geom = StripeGeometry::diagonal(
            CouplingPattern::Alternating { g1: 1.0, g2: 3.0 },
            InteractionSpec::new(2.0, 6),
            vec![CellRange::new(-15, 15)],
        )
        .unwrap();
        for k in [-2.9, -0.7, 0.0, 1.3, PI] {
            let h = geom.build_bloch(k).unwrap();
            let dev = (&h - h.adjoint()).norm();
            assert!(dev == 0.0, "hermiticity deviation {dev}");
        }
    }

    #[test]
    fn spectrum_even_in_k() {
        let geom = StripeGeometry::diagonal(
            CouplingPattern::Uniform { g: 1.0 },
            InteractionSpec::new(1.5, 2),
            vec![CellRange::new(-8, 8)],
        )
        .unwrap();
        for k in [0.3, 1.1, 2.7] {
            let ep: Vec<f64> = spectra::hermitian_eig(&geom.build_bloch(k).unwrap())
                .unwrap()
                .iter()
                .map(|p| p.energy)
                .collect();
            let em: Vec<f64> = spectra::hermitian_eig(&geom.build_bloch(-k).unwrap())
                .unwrap()
                .iter()
                .map(|p| p.energy)
                .collect();
            for (a, b) in ep.iter().zip(&em) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_two_boson_envelope() {
        // Wide uniform diagonal stripe: extreme eigenvalues approach the
        // bulk envelope +-4g cos(k_j / 2).
        let geom = StripeGeometry::diagonal(
            CouplingPattern::Uniform { g: 1.0 },
            InteractionSpec::NONE,
            vec![CellRange::new(-40, 40)],
        )
        .unwrap();
        for k in [0.0f64, 0.8, 1.6] {
            let e: Vec<f64> = spectra::hermitian_eig(&geom.build_bloch(k).unwrap())
                .unwrap()
                .iter()
                .map(|p| p.energy)
                .collect();
            let top = 4.0 * (k / 2.0).cos();
            assert!(e.last().unwrap() <= &(top + 1e-9));
            assert!((e.last().unwrap() - top).abs() < 0.05, "k={k}");
            assert!((e.first().unwrap() + top).abs() < 0.05, "k={k}");
        }
    }

    #[test]
    fn axis_stripe_with_interaction_is_rejected() {
        let err = StripeGeometry::axis(
            CouplingPattern::Uniform { g: 1.0 },
            InteractionSpec::new(2.0, 3),
            vec![CellRange::new(-5, 5)],
        )
        .unwrap_err();
        assert!(matches!(err, BlochError::BrokenTranslation(_)));

        // The diagonal stripe carries the same interaction fine.
        assert!(StripeGeometry::diagonal(
            CouplingPattern::Uniform { g: 1.0 },
            InteractionSpec::new(2.0, 3),
            vec![CellRange::new(-5, 5)],
        )
        .is_ok());
    }

    #[test]
    fn commensurate_stripe_momenta_reproduce_periodic_chain() {
        // Union of single-boson stripe Bloch eigenvalues over k = 2 pi q / L
        // equals the spectrum of the periodic chain of L cells.
        for (pattern, cells) in [
            (CouplingPattern::Uniform { g: 1.0 }, 12i64),
            (CouplingPattern::Alternating { g1: 0.7, g2: 1.9 }, 10),
        ] {
            let geom = StripeGeometry::axis(pattern, InteractionSpec::NONE, vec![]).unwrap();
            let mut bloch_union = Vec::new();
            for q in 0..cells {
                let mut k = 2.0 * PI * q as f64 / cells as f64;
                if k > PI {
                    k -= 2.0 * PI;
                }
                let pairs = spectra::hermitian_eig(&geom.build_bloch(k).unwrap()).unwrap();
                bloch_union.extend(pairs.iter().map(|p| p.energy));
            }
            bloch_union.sort_by(|a, b| a.partial_cmp(b).unwrap());

            let spec = LatticeSpec::new(
                pattern,
                InteractionSpec::NONE,
                0,
                cells - 1,
                Boundary::Periodic,
            )
            .unwrap();
            let op = SyntheticOperator::build(&spec, 1).unwrap();
            let pairs = spectra::hermitian_eig_real(&op.to_dense()).unwrap();
            assert_eq!(pairs.len(), bloch_union.len());
            for (p, b) in pairs.iter().zip(&bloch_union) {
                assert_abs_diff_eq!(p.energy, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn exchange_reflection_is_an_involution() {
        let geom = StripeGeometry::diagonal(
            CouplingPattern::Alternating { g1: 1.0, g2: 3.0 },
            InteractionSpec::new(2.0, 6),
            vec![CellRange::new(-15, 15)],
        )
        .unwrap();
        let refl = geom.exchange_reflection().unwrap();
        for (i, &(j, q)) in refl.iter().enumerate() {
            let (back, qback) = refl[j];
            assert_eq!(back, i);
            assert_eq!(qback, -q);
        }

        // Asymmetric window: the swap leaves the window.
        let lopsided = StripeGeometry::diagonal(
            CouplingPattern::Uniform { g: 1.0 },
            InteractionSpec::NONE,
            vec![CellRange::new(-2, 5)],
        )
        .unwrap();
        assert!(lopsided.exchange_reflection().is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn stripe_bloch_hermitian_for_random_parameters(
                k in -PI..PI,
                g1 in 0.1f64..3.0,
                g2 in 0.1f64..3.0,
                u in -4.0f64..4.0,
                range in 0u32..4,
            ) {
                let geom = StripeGeometry::diagonal(
                    CouplingPattern::Alternating { g1, g2 },
                    InteractionSpec::new(u, range),
                    vec![CellRange::new(-4, 4)],
                )
                .unwrap();
                let h = geom.build_bloch(k).unwrap();
                prop_assert_eq!((&h - h.adjoint()).norm(), 0.0);
            }

            #[test]
            fn bulk_ssh2d_matches_analytic_at_random_k(
                km in -PI..PI,
                kn in -PI..PI,
                g1 in 0.1f64..3.0,
                g2 in 0.1f64..3.0,
            ) {
                let h = bulk_bloch_ssh2d(km, kn, g1, g2);
                let pairs = spectra::hermitian_eig(&h).unwrap();
                let expect = analytic_band_ssh2d(km, kn, g1, g2);
                for (p, e) in pairs.iter().zip(&expect) {
                    prop_assert!((p.energy - e).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn axis_stripe_factors_into_bloch_and_chain_spectra() {
        // At U = 0 the axis stripe is a tensor sum: its spectrum at k_m is
        // every 1D Bloch band value plus every eigenvalue of the open
        // transverse chain.
        let (g1, g2) = (1.0, 3.0);
        let geom = StripeGeometry::axis(
            CouplingPattern::Alternating { g1, g2 },
            InteractionSpec::NONE,
            vec![CellRange::new(-15, 15)],
        )
        .unwrap();
        let chain = LatticeSpec::ssh(g1, g2, -15, 15, Boundary::Open);
        let chain_eigs: Vec<f64> =
            spectra::hermitian_eig_real(&SyntheticOperator::build(&chain, 1).unwrap().to_dense())
                .unwrap()
                .iter()
                .map(|p| p.energy)
                .collect();
        for k in [0.0, 0.77, -2.1] {
            let stripe: Vec<f64> = spectra::hermitian_eig(&geom.build_bloch(k).unwrap())
                .unwrap()
                .iter()
                .map(|p| p.energy)
                .collect();
            let mut sums: Vec<f64> = ssh1d_bands(k, g1, g2)
                .iter()
                .flat_map(|b| chain_eigs.iter().map(move |c| b + c))
                .collect();
            sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(stripe.len(), sums.len());
            for (a, b) in stripe.iter().zip(&sums) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn parity_classification_is_exhaustive_on_the_interface_stripe() {
        // Reflection-symmetric stripe at k_j = 0: after degenerate-subspace
        // rotation every eigenvector carries a definite exchange parity.
        let geom = StripeGeometry::diagonal(
            CouplingPattern::Alternating { g1: 1.0, g2: 3.0 },
            InteractionSpec::new(2.0, 6),
            vec![CellRange::new(-15, 15)],
        )
        .unwrap();
        let pairs = spectra::hermitian_eig(&geom.build_bloch(0.0).unwrap()).unwrap();
        let refl = geom.exchange_reflection().unwrap();
        let labeled = spectra::resolve_parity(&pairs, &refl, 0.0, spectra::DEGENERACY_TOL);
        let mixed = labeled
            .iter()
            .filter(|(_, p)| *p == spectra::Parity::Mixed)
            .count();
        assert_eq!(mixed, 0, "{mixed} of {} modes left unclassified", labeled.len());
    }

    #[test]
    fn u_zero_diagonal_bands_fill_the_analytic_envelope() {
        let geom = StripeGeometry::diagonal(
            CouplingPattern::Alternating { g1: 3.0, g2: 1.0 },
            InteractionSpec::NONE,
            vec![CellRange::new(-15, 15)],
        )
        .unwrap();
        let bands = geom.projected_bands(9, false).unwrap();
        let bulk = bulk_reference_diagonal(geom.pattern(), 2, &bands.k_grid, 720).unwrap();
        for ki in 0..bands.k_grid.len() {
            let lo = bands.energies[ki].first().unwrap();
            let hi = bands.energies[ki].last().unwrap();
            let blo = bulk.energies[ki].first().unwrap();
            let bhi = bulk.energies[ki].last().unwrap();
            assert!((lo - blo).abs() < 0.05, "bottom edge at k index {ki}");
            assert!((hi - bhi).abs() < 0.05, "top edge at k index {ki}");
        }
    }
}
