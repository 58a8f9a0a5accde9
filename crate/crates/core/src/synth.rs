//! The 1D -> N-D mapping. An N-boson amplitude field lives on the N-fold
//! product of the chain's site window; the synthetic-lattice operator moves
//! one coordinate at a time with the chain's bond energies and carries the
//! summed pair interaction on its diagonal. Exchange symmetry is a property
//! of states, not of the operator: the operator acts on the full grid and
//! commutes with every permutation of the axes.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::model::{CouplingPattern, LatticeSpec, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("boson count must be at least 1")]
    NoBosons,
    #[error("synthetic grid with {0} sites exceeds the supported size")]
    GridTooLarge(usize),
    #[error("index tuple {0:?} is not canonical (sorted ascending)")]
    NonCanonical(Vec<i64>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Inclusive range of raw site indices, one copy per synthetic axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteWindow {
    pub lo: i64,
    pub hi: i64,
}

impl SiteWindow {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty site window");
        SiteWindow { lo, hi }
    }

    pub fn of(spec: &LatticeSpec) -> Self {
        SiteWindow::new(spec.site_min(), spec.site_max())
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, site: i64) -> bool {
        site >= self.lo && site <= self.hi
    }

    pub fn offset(&self, site: i64) -> usize {
        debug_assert!(self.contains(site));
        (site - self.lo) as usize
    }

    pub fn site(&self, offset: usize) -> i64 {
        self.lo + offset as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// Row-major flat index of a tuple over `window^n`.
pub fn flat_index(window: SiteWindow, tuple: &[i64]) -> usize {
    let len = window.len();
    let mut flat = 0;
    for &site in tuple {
        flat = flat * len + window.offset(site);
    }
    flat
}

/// Visit every tuple of the grid `window^n` in row-major (flat) order.
pub fn for_each_tuple(window: SiteWindow, n: usize, mut f: impl FnMut(usize, &[i64])) {
    let mut tuple = vec![window.lo; n];
    let dim = window.len().pow(n as u32);
    for flat in 0..dim {
        f(flat, &tuple);
        for axis in (0..n).rev() {
            if tuple[axis] < window.hi {
                tuple[axis] += 1;
                break;
            }
            tuple[axis] = window.lo;
        }
    }
}

/// Visit every canonical (non-decreasing) tuple in lexicographic order.
pub fn for_each_canonical(window: SiteWindow, n: usize, mut f: impl FnMut(&[i64])) {
    let mut tuple = vec![window.lo; n];
    loop {
        f(&tuple);
        let mut axis = n;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if tuple[axis] < window.hi {
                tuple[axis] += 1;
                let floor = tuple[axis];
                for t in tuple.iter_mut().skip(axis + 1) {
                    *t = floor;
                }
                break;
            }
        }
    }
}

/// A canonical (sorted ascending) tuple of raw site indices, one per boson.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexTuple(Vec<i64>);

impl IndexTuple {
    /// Accepts only canonical tuples.
    pub fn new(lambdas: Vec<i64>) -> Result<Self, SynthError> {
        if lambdas.windows(2).any(|w| w[0] > w[1]) {
            return Err(SynthError::NonCanonical(lambdas));
        }
        Ok(IndexTuple(lambdas))
    }

    /// Sorts the input into canonical form.
    pub fn from_unsorted(mut lambdas: Vec<i64>) -> Self {
        lambdas.sort_unstable();
        IndexTuple(lambdas)
    }

    pub fn lambdas(&self) -> &[i64] {
        &self.0
    }

    pub fn n_bosons(&self) -> usize {
        self.0.len()
    }

    /// Occupancies `(site, count)` of the distinct sites, ascending.
    pub fn multiplicities(&self) -> Vec<(i64, u32)> {
        let mut out: Vec<(i64, u32)> = Vec::new();
        for &site in &self.0 {
            match out.last_mut() {
                Some((s, c)) if *s == site => *c += 1,
                _ => out.push((site, 1)),
            }
        }
        out
    }

    /// sqrt(N! / prod_i xi_i!), the amplitude conversion factor between the
    /// symmetric field value and the physical excitation amplitude.
    pub fn conversion_factor(&self) -> f64 {
        let n = self.0.len() as u64;
        let mut ratio = factorial(n) as f64;
        for (_, count) in self.multiplicities() {
            ratio /= factorial(count as u64) as f64;
        }
        ratio.sqrt()
    }

    /// Number of distinct permutations of the tuple, N! / prod_i xi_i!.
    pub fn class_size(&self) -> u64 {
        let mut size = factorial(self.0.len() as u64);
        for (_, count) in self.multiplicities() {
            size /= factorial(count as u64);
        }
        size
    }

    /// All distinct permutations, in lexicographic order.
    pub fn distinct_permutations(&self) -> Vec<Vec<i64>> {
        let mut current = self.0.clone();
        let mut out = vec![current.clone()];
        while next_permutation(&mut current) {
            out.push(current.clone());
        }
        out
    }
}

fn factorial(n: u64) -> u64 {
    (2..=n).product::<u64>().max(1)
}

/// Lexicographic successor among distinct permutations; `false` at the end.
fn next_permutation(seq: &mut [i64]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// The complex wavefunction over the N-fold product of the site window.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField {
    n_bosons: usize,
    window: SiteWindow,
    data: Vec<C64>,
    pub time: f64,
}

impl AmplitudeField {
    pub fn zeros(window: SiteWindow, n_bosons: usize) -> Result<Self, SynthError> {
        if n_bosons == 0 {
            return Err(SynthError::NoBosons);
        }
        let dim = checked_dim(window, n_bosons)?;
        Ok(AmplitudeField {
            n_bosons,
            window,
            data: vec![C64::new(0.0, 0.0); dim],
            time: 0.0,
        })
    }

    pub fn from_raw(
        window: SiteWindow,
        n_bosons: usize,
        data: Vec<C64>,
    ) -> Result<Self, SynthError> {
        let dim = checked_dim(window, n_bosons)?;
        assert_eq!(data.len(), dim, "raw data length mismatch");
        Ok(AmplitudeField {
            n_bosons,
            window,
            data,
            time: 0.0,
        })
    }

    pub fn n_bosons(&self) -> usize {
        self.n_bosons
    }

    pub fn window(&self) -> SiteWindow {
        self.window
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn flat_index(&self, tuple: &[i64]) -> usize {
        debug_assert_eq!(tuple.len(), self.n_bosons);
        flat_index(self.window, tuple)
    }

    pub fn get(&self, tuple: &[i64]) -> C64 {
        self.data[self.flat_index(tuple)]
    }

    pub fn set(&mut self, tuple: &[i64], value: C64) {
        let idx = self.flat_index(tuple);
        self.data[idx] = value;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest deviation from exchange symmetry over the whole grid.
    pub fn symmetry_violation(&self) -> f64 {
        let sym = SymmetryIndex::build(self.window, self.n_bosons);
        let mut worst = 0.0f64;
        for (flat, &canon) in sym.canonical_image.iter().enumerate() {
            let d = (self.data[flat] - self.data[canon as usize]).norm();
            worst = worst.max(d);
        }
        worst
    }

    /// Projects onto the exchange-symmetric subspace: every tuple takes the
    /// mean of its permutation class. Idempotent to the last bit.
    pub fn symmetrize(&mut self) {
        let sym = SymmetryIndex::build(self.window, self.n_bosons);
        let dim = self.data.len();
        let mut sum = vec![C64::new(0.0, 0.0); dim];
        let mut count = vec![0u32; dim];
        let mut first = vec![C64::new(0.0, 0.0); dim];
        let mut all_equal = vec![true; dim];
        for (flat, &canon) in sym.canonical_image.iter().enumerate() {
            let c = canon as usize;
            let v = self.data[flat];
            if count[c] == 0 {
                first[c] = v;
            } else if v != first[c] {
                all_equal[c] = false;
            }
            sum[c] += v;
            count[c] += 1;
        }
        for (flat, &canon) in sym.canonical_image.iter().enumerate() {
            let c = canon as usize;
            self.data[flat] = if all_equal[c] {
                first[c]
            } else {
                sum[c] / count[c] as f64
            };
        }
    }
}

fn checked_dim(window: SiteWindow, n_bosons: usize) -> Result<usize, SynthError> {
    const MAX_GRID: usize = 1 << 26;
    let mut dim = 1usize;
    for _ in 0..n_bosons {
        dim = dim.saturating_mul(window.len());
        if dim > MAX_GRID {
            return Err(SynthError::GridTooLarge(dim));
        }
    }
    Ok(dim)
}

/// Probability amplitude that the bosons are observed with the occupancy
/// pattern of the canonical `tuple`: u = sqrt(N!/prod xi!) * v(tuple).
pub fn v_to_u(field: &AmplitudeField, tuple: &IndexTuple) -> C64 {
    field.get(tuple.lambdas()) * tuple.conversion_factor()
}

/// N-th-order correlation |v(tuple)|^2.
pub fn correlation(field: &AmplitudeField, tuple: &IndexTuple) -> f64 {
    field.get(tuple.lambdas()).norm_sqr()
}

/// Average boson number per raw site, plus the field norm. For a normalized
/// field the values sum to N; for an unnormalized one they are returned
/// as-is and scale with norm^2.
pub fn boson_number_distribution(field: &AmplitudeField) -> (Vec<f64>, f64) {
    let window = field.window();
    let mut per_site = vec![0.0f64; window.len()];
    for_each_tuple(window, field.n_bosons(), |flat, tuple| {
        let w = field.data()[flat].norm_sqr();
        if w != 0.0 {
            for &site in tuple {
                per_site[window.offset(site)] += w;
            }
        }
    });
    (per_site, field.norm())
}

/// Mean cell distance averaged over unordered boson pairs, weighted by the
/// field's probability density. Zero for a single boson or a zero field.
pub fn mean_pair_cell_distance(field: &AmplitudeField, pattern: &CouplingPattern) -> f64 {
    let n = field.n_bosons();
    if n < 2 {
        return 0.0;
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let mut acc = 0.0;
    let mut norm_sq = 0.0;
    for_each_tuple(field.window(), n, |flat, tuple| {
        let w = field.data()[flat].norm_sqr();
        if w == 0.0 {
            return;
        }
        norm_sq += w;
        let mut dist = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                dist += (pattern.cell_of(tuple[i]) - pattern.cell_of(tuple[j])).abs() as f64;
            }
        }
        acc += w * dist / pairs;
    });
    if norm_sq == 0.0 {
        0.0
    } else {
        acc / norm_sq
    }
}

/// Interaction energy of a configuration: U times the number of unordered
/// boson pairs within `range` unit cells of one another.
pub fn onsite_potential(spec: &LatticeSpec, tuple: &[i64]) -> Result<f64, SynthError> {
    let mut total = 0.0;
    for (i, &a) in tuple.iter().enumerate() {
        for &b in &tuple[i + 1..] {
            total += spec.pair_potential(a, b)?;
        }
    }
    Ok(total)
}

/// Flat-index bookkeeping for the permutation action on the grid.
pub struct SymmetryIndex {
    /// Flat index of the sorted image of every tuple.
    pub canonical_image: Vec<u32>,
    /// Flat indices of the canonical tuples, ascending.
    pub canonical_rows: Vec<u32>,
}

impl SymmetryIndex {
    pub fn build(window: SiteWindow, n_bosons: usize) -> Self {
        let dim = window.len().pow(n_bosons as u32);
        let mut canonical_image = vec![0u32; dim];
        let mut canonical_rows = Vec::new();
        let len = window.len();
        let mut scratch = Vec::with_capacity(n_bosons);
        for_each_tuple(window, n_bosons, |flat, tuple| {
            if tuple.windows(2).all(|w| w[0] <= w[1]) {
                canonical_image[flat] = flat as u32;
                canonical_rows.push(flat as u32);
            } else {
                scratch.clear();
                scratch.extend_from_slice(tuple);
                scratch.sort_unstable();
                let mut sorted_flat = 0usize;
                for &site in &scratch {
                    sorted_flat = sorted_flat * len + window.offset(site);
                }
                canonical_image[flat] = sorted_flat as u32;
            }
        });
        SymmetryIndex {
            canonical_image,
            canonical_rows,
        }
    }
}

/// Sparse Hermitian operator over the full N-D grid: single-coordinate hops
/// with the chain's bond energies plus the diagonal interaction potential.
#[derive(Debug, Clone)]
pub struct SyntheticOperator {
    n_bosons: usize,
    window: SiteWindow,
    pattern: CouplingPattern,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    amps: Vec<f64>,
    diag: Vec<f64>,
}

impl SyntheticOperator {
    pub fn build(spec: &LatticeSpec, n_bosons: usize) -> Result<Self, SynthError> {
        if n_bosons == 0 {
            return Err(SynthError::NoBosons);
        }
        let window = SiteWindow::of(spec);
        let dim = checked_dim(window, n_bosons)?;
        let len = window.len();
        let has_interaction = spec.interaction.u != 0.0;

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(dim * 2 * n_bosons);
        let mut amps = Vec::with_capacity(dim * 2 * n_bosons);
        let mut diag = vec![0.0f64; dim];

        row_ptr.push(0u32);
        let mut build_err = None;
        for_each_tuple(window, n_bosons, |flat, tuple| {
            if build_err.is_some() {
                return;
            }
            if has_interaction {
                match onsite_potential(spec, tuple) {
                    Ok(p) => diag[flat] = p,
                    Err(e) => {
                        build_err = Some(e);
                        return;
                    }
                }
            }
            // Strides are len^(n-1-axis); walking axes outermost-first keeps
            // the stride computation cheap.
            let mut stride = len.pow(n_bosons as u32 - 1);
            for (axis, &site) in tuple.iter().enumerate() {
                for dir in [-1i64, 1] {
                    if let Some((nbr, amp)) = spec.neighbor(site, dir) {
                        let col =
                            flat + stride * window.offset(nbr) - stride * window.offset(site);
                        cols.push(col as u32);
                        amps.push(amp);
                    }
                }
                if axis + 1 < n_bosons {
                    stride /= len;
                }
            }
            row_ptr.push(cols.len() as u32);
        });
        if let Some(e) = build_err {
            return Err(e);
        }

        Ok(SyntheticOperator {
            n_bosons,
            window,
            pattern: spec.pattern,
            row_ptr,
            cols,
            amps,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn n_bosons(&self) -> usize {
        self.n_bosons
    }

    pub fn window(&self) -> SiteWindow {
        self.window
    }

    pub fn pattern(&self) -> &CouplingPattern {
        &self.pattern
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// out = H v over the full grid.
    pub fn apply(&self, out: &mut [C64], v: &[C64]) {
        assert_eq!(out.len(), self.dim());
        assert_eq!(v.len(), self.dim());
        for row in 0..self.dim() {
            out[row] = self.row_dot(row, v);
        }
    }

    /// out = H v computed only on canonical rows, then copied onto each
    /// permutation image. For an exchange-symmetric `v` this equals
    /// `apply` exactly while guaranteeing bit-exact output symmetry.
    pub fn apply_symmetric(&self, out: &mut [C64], v: &[C64], sym: &SymmetryIndex) {
        assert_eq!(out.len(), self.dim());
        assert_eq!(v.len(), self.dim());
        for &row in &sym.canonical_rows {
            out[row as usize] = self.row_dot(row as usize, v);
        }
        for (flat, &canon) in sym.canonical_image.iter().enumerate() {
            if canon as usize != flat {
                out[flat] = out[canon as usize];
            }
        }
    }

    #[inline]
    fn row_dot(&self, row: usize, v: &[C64]) -> C64 {
        let start = self.row_ptr[row] as usize;
        let end = self.row_ptr[row + 1] as usize;
        let mut acc = v[row] * self.diag[row];
        for k in start..end {
            acc += v[self.cols[k] as usize] * self.amps[k];
        }
        acc
    }

    /// Gershgorin bound on the spectral radius: max over rows of
    /// |diag| + sum |hops|.
    pub fn infinity_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for row in 0..self.dim() {
            let start = self.row_ptr[row] as usize;
            let end = self.row_ptr[row + 1] as usize;
            let sum: f64 = self.diag[row].abs()
                + self.amps[start..end].iter().map(|a| a.abs()).sum::<f64>();
            worst = worst.max(sum);
        }
        worst
    }

    /// Real expectation value <v|H|v> (the imaginary part of a Hermitian
    /// form vanishes; it is discarded).
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for row in 0..self.dim() {
            acc += v[row].conj() * self.row_dot(row, v);
        }
        acc.re
    }

    /// Exact Hermiticity: every entry has a bit-identical transpose partner.
    pub fn is_hermitian(&self) -> bool {
        let mut entries: HashMap<(u32, u32), f64> = HashMap::new();
        for row in 0..self.dim() {
            let start = self.row_ptr[row] as usize;
            let end = self.row_ptr[row + 1] as usize;
            for k in start..end {
                *entries.entry((row as u32, self.cols[k])).or_insert(0.0) += self.amps[k];
            }
        }
        entries
            .iter()
            .all(|(&(r, c), &a)| entries.get(&(c, r)) == Some(&a))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for row in 0..n {
            m[(row, row)] = self.diag[row];
            let start = self.row_ptr[row] as usize;
            let end = self.row_ptr[row + 1] as usize;
            for k in start..end {
                m[(row, self.cols[k] as usize)] += self.amps[k];
            }
        }
        m
    }

    pub fn to_dense_complex(&self) -> DMatrix<C64> {
        self.to_dense().map(|x| C64::new(x, 0.0))
    }

    /// Projection onto the exchange-symmetric sector, in the basis of
    /// canonical tuples (lexicographic order). Its spectrum is the physical
    /// N-boson spectrum.
    pub fn symmetric_sector_matrix(&self) -> (Vec<IndexTuple>, DMatrix<f64>) {
        let sym = SymmetryIndex::build(self.window, self.n_bosons);
        let mut rank = vec![u32::MAX; self.dim()];
        let mut tuples = Vec::new();
        for_each_canonical(self.window, self.n_bosons, |tuple| {
            let t = IndexTuple::new(tuple.to_vec()).expect("canonical by construction");
            tuples.push(t);
        });
        let mut weight = vec![0.0f64; tuples.len()];
        for (i, t) in tuples.iter().enumerate() {
            let mut flat = 0usize;
            for &site in t.lambdas() {
                flat = flat * self.window.len() + self.window.offset(site);
            }
            rank[flat] = i as u32;
            weight[i] = t.class_size() as f64;
        }
        let class_of = |flat: usize| rank[sym.canonical_image[flat] as usize] as usize;

        let m = tuples.len();
        let mut mat = DMatrix::zeros(m, m);
        for row in 0..self.dim() {
            let a = class_of(row);
            let start = self.row_ptr[row] as usize;
            let end = self.row_ptr[row + 1] as usize;
            for k in start..end {
                let b = class_of(self.cols[k] as usize);
                mat[(a, b)] += self.amps[k] / (weight[a] * weight[b]).sqrt();
            }
        }
        for (i, t) in tuples.iter().enumerate() {
            let mut flat = 0usize;
            for &site in t.lambdas() {
                flat = flat * self.window.len() + self.window.offset(site);
            }
            mat[(i, i)] += self.diag[flat];
        }
        (tuples, mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;
    use approx::assert_abs_diff_eq;

    fn uniform_open(g: f64, k: i64) -> LatticeSpec {
        LatticeSpec::uniform(g, 0, k - 1, Boundary::Open)
    }

    #[test]
    fn single_boson_operator_is_tridiagonal() {
        let spec = uniform_open(1.5, 5);
        let op = SyntheticOperator::build(&spec, 1).unwrap();
        let dense = op.to_dense();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if (i as i64 - j as i64).abs() == 1 { 1.5 } else { 0.0 };
                assert_eq!(dense[(i, j)], expect);
            }
        }
        assert!(op.is_hermitian());
    }

    #[test]
    fn diagonal_counts_pairs_within_range() {
        let spec = LatticeSpec::uniform(1.0, 0, 11, Boundary::Open).with_interaction(2.0, 6);
        assert_eq!(onsite_potential(&spec, &[0, 0, 0]).unwrap(), 6.0);
        assert_eq!(onsite_potential(&spec, &[0, 5, 11]).unwrap(), 4.0);
        assert_eq!(onsite_potential(&spec, &[0, 7, 11]).unwrap(), 2.0);

        // Four bosons stacked on one site: C(4,2) pairs.
        let spec1 = LatticeSpec::uniform(1.0, 0, 3, Boundary::Open).with_interaction(1.0, 0);
        assert_eq!(onsite_potential(&spec1, &[0, 0, 0, 0]).unwrap(), 6.0);

        // N=2 same-site pair feels U for any range; beyond range it does not.
        let spec2 = LatticeSpec::uniform(1.0, 0, 9, Boundary::Open).with_interaction(3.0, 4);
        assert_eq!(onsite_potential(&spec2, &[2, 2]).unwrap(), 3.0);
        assert_eq!(onsite_potential(&spec2, &[0, 5]).unwrap(), 0.0);
    }

    #[test]
    fn operator_diag_matches_onsite_potential() {
        let spec = LatticeSpec::uniform(1.0, 0, 6, Boundary::Open).with_interaction(1.7, 1);
        let op = SyntheticOperator::build(&spec, 3).unwrap();
        let window = op.window();
        for_each_tuple(window, 3, |flat, tuple| {
            assert_eq!(op.diag()[flat], onsite_potential(&spec, tuple).unwrap());
        });
    }

    #[test]
    fn conversion_factors() {
        let t2 = IndexTuple::new(vec![0, 5]).unwrap();
        assert_abs_diff_eq!(t2.conversion_factor(), 2f64.sqrt());
        let t2s = IndexTuple::new(vec![3, 3]).unwrap();
        assert_abs_diff_eq!(t2s.conversion_factor(), 1.0);
        let t3 = IndexTuple::new(vec![0, 1, 2]).unwrap();
        assert_abs_diff_eq!(t3.conversion_factor(), 6f64.sqrt());
        assert!(IndexTuple::new(vec![1, 0]).is_err());
    }

    #[test]
    fn distinct_permutations_counts() {
        let t = IndexTuple::new(vec![0, 0, 3]).unwrap();
        let perms = t.distinct_permutations();
        assert_eq!(perms.len(), 3);
        assert_eq!(t.class_size(), 3);
        let t = IndexTuple::new(vec![1, 2, 3]).unwrap();
        assert_eq!(t.distinct_permutations().len(), 6);
    }

    #[test]
    fn symmetrize_averages_permutations() {
        let window = SiteWindow::new(0, 2);
        let mut field = AmplitudeField::zeros(window, 2).unwrap();
        field.set(&[0, 1], C64::new(1.0, 0.0));
        field.symmetrize();
        assert_eq!(field.get(&[0, 1]), C64::new(0.5, 0.0));
        assert_eq!(field.get(&[1, 0]), C64::new(0.5, 0.0));
        assert_eq!(field.symmetry_violation(), 0.0);

        // Projector property, bit-exact.
        let mut field3 = AmplitudeField::zeros(SiteWindow::new(0, 3), 3).unwrap();
        let mut c = 1.0f64;
        for i in 0..field3.data().len() {
            field3.data_mut()[i] = C64::new(c.sin(), (2.0 * c).cos());
            c += 0.73;
        }
        let mut once = field3.clone();
        once.symmetrize();
        let mut twice = once.clone();
        twice.symmetrize();
        assert_eq!(once, twice);
    }

    #[test]
    fn boson_numbers_pinned_states() {
        let window = SiteWindow::new(0, 5);
        // Two bosons pinned on site 0: u_00 = 1 means v_00 = 1.
        let mut field = AmplitudeField::zeros(window, 2).unwrap();
        field.set(&[0, 0], C64::new(1.0, 0.0));
        let (nk, norm) = boson_number_distribution(&field);
        assert_abs_diff_eq!(nk[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(norm, 1.0);
        assert!(nk[1..].iter().all(|&x| x == 0.0));

        // One boson each on 0 and 5: u_05 = 1 means v = 1/sqrt(2) on both orders.
        let mut field = AmplitudeField::zeros(window, 2).unwrap();
        let amp = C64::new(1.0 / 2f64.sqrt(), 0.0);
        field.set(&[0, 5], amp);
        field.set(&[5, 0], amp);
        let (nk, _) = boson_number_distribution(&field);
        assert_abs_diff_eq!(nk[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nk[5], 1.0, epsilon = 1e-15);
        let t = IndexTuple::new(vec![0, 5]).unwrap();
        assert_abs_diff_eq!(v_to_u(&field, &t).norm_sqr(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(correlation(&field, &t), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn operator_commutes_with_permutation_action() {
        let spec = LatticeSpec::ssh(1.3, 0.7, 0, 2, Boundary::Open).with_interaction(0.9, 1);
        let op = SyntheticOperator::build(&spec, 2).unwrap();
        let window = op.window();
        let mut field = AmplitudeField::zeros(window, 2).unwrap();
        let mut c = 0.0f64;
        for i in 0..field.data().len() {
            field.data_mut()[i] = C64::new((1.0 + c).sin(), (0.5 + c).cos());
            c += 0.31;
        }
        field.symmetrize();
        let sym = SymmetryIndex::build(window, 2);
        let mut out_plain = vec![C64::new(0.0, 0.0); op.dim()];
        let mut out_sym = vec![C64::new(0.0, 0.0); op.dim()];
        op.apply(&mut out_plain, field.data());
        op.apply_symmetric(&mut out_sym, field.data(), &sym);
        // Symmetric input: both routes agree to rounding, and the canonical
        // route is exactly symmetric.
        for (a, b) in out_plain.iter().zip(&out_sym) {
            assert!((a - b).norm() < 1e-12);
        }
        let out_field = AmplitudeField::from_raw(window, 2, out_sym).unwrap();
        assert_eq!(out_field.symmetry_violation(), 0.0);
    }

    #[test]
    fn periodic_separability_of_spectra() {
        // U = 0, periodic: N-boson eigenvalues are all N-fold sums of
        // single-boson ones.
        for (n, cells) in [(2u32, 10i64), (3, 6)] {
            let spec = LatticeSpec::uniform(1.0, 0, cells - 1, Boundary::Periodic);
            let one = SyntheticOperator::build(&spec, 1).unwrap().to_dense();
            let many = SyntheticOperator::build(&spec, n as usize).unwrap().to_dense();
            let e1 = one.symmetric_eigen().eigenvalues;
            let mut sums: Vec<f64> = vec![0.0];
            for _ in 0..n {
                sums = sums
                    .iter()
                    .flat_map(|s| e1.iter().map(move |e| s + e))
                    .collect();
            }
            sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut e_many: Vec<f64> =
                many.symmetric_eigen().eigenvalues.iter().cloned().collect();
            e_many.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(e_many.len(), sums.len());
            for (a, b) in e_many.iter().zip(&sums) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_sector_dimension() {
        let spec = uniform_open(1.0, 4);
        let op = SyntheticOperator::build(&spec, 3).unwrap();
        let (tuples, mat) = op.symmetric_sector_matrix();
        // C(4+3-1, 3) = 20
        assert_eq!(tuples.len(), 20);
        assert_eq!(mat.nrows(), 20);
        // Hermitian.
        for i in 0..20 {
            for j in 0..20 {
                assert_abs_diff_eq!(mat[(i, j)], mat[(j, i)], epsilon = 1e-14);
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn filled_field(window: SiteWindow, n: usize, seed: u64) -> AmplitudeField {
            let mut field = AmplitudeField::zeros(window, n).unwrap();
            let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            for v in field.data_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
                *v = C64::new(re, im);
            }
            field
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn symmetrize_is_an_exact_projector(seed in any::<u64>(), n in 2usize..=3) {
                let mut field = filled_field(SiteWindow::new(0, 3), n, seed);
                field.symmetrize();
                prop_assert_eq!(field.symmetry_violation(), 0.0);
                let mut again = field.clone();
                again.symmetrize();
                prop_assert_eq!(field, again);
            }

            #[test]
            fn boson_numbers_sum_to_n_times_norm_sq(seed in any::<u64>(), n in 1usize..=3) {
                let field = filled_field(SiteWindow::new(-2, 2), n, seed);
                let (nk, norm) = boson_number_distribution(&field);
                let total: f64 = nk.iter().sum();
                prop_assert!((total - n as f64 * norm * norm).abs() <= 1e-10 * total.max(1.0));
            }

            #[test]
            fn operator_is_hermitian_and_commutes_with_exchange(
                g1 in 0.1f64..3.0,
                g2 in 0.1f64..3.0,
                u in -4.0f64..4.0,
                range in 0u32..3,
                seed in any::<u64>(),
            ) {
                let spec = LatticeSpec::ssh(g1, g2, 0, 2, Boundary::Open).with_interaction(u, range);
                let op = SyntheticOperator::build(&spec, 2).unwrap();
                prop_assert!(op.is_hermitian());

                let mut field = filled_field(op.window(), 2, seed);
                field.symmetrize();
                let sym = SymmetryIndex::build(op.window(), 2);
                let mut out = vec![C64::new(0.0, 0.0); op.dim()];
                op.apply_symmetric(&mut out, field.data(), &sym);
                let out_field = AmplitudeField::from_raw(op.window(), 2, out).unwrap();
                prop_assert_eq!(out_field.symmetry_violation(), 0.0);
            }

            #[test]
            fn u_conversion_consistency(seed in any::<u64>()) {
                // Sum over canonical tuples of |u|^2 equals the squared
                // norm over the full grid.
                let mut field = filled_field(SiteWindow::new(0, 4), 2, seed);
                field.symmetrize();
                let mut canonical_total = 0.0;
                for_each_canonical(field.window(), 2, |tuple| {
                    let t = IndexTuple::new(tuple.to_vec()).unwrap();
                    canonical_total += v_to_u(&field, &t).norm_sqr();
                });
                prop_assert!((canonical_total - field.norm_sq()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_zero_bosons() {
        let spec = uniform_open(1.0, 4);
        assert!(matches!(
            SyntheticOperator::build(&spec, 0),
            Err(SynthError::NoBosons)
        ));
    }
}
