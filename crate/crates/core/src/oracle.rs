//! Brute-force second-quantized evolution and diagonalization in the
//! bosonic occupation basis. This module is the independent ground truth
//! for the synthetic-lattice mapping: it never touches the N-dimensional
//! grid, so agreement between the two routes validates the mapping, the
//! amplitude conversion, and the observables.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::dynamics::{source_envelope, DynamicsError, EvolveParams, Rk4Buffers, SourceTerm};
use crate::model::{ExcitationSpec, LatticeSpec};
use crate::synth::{self, AmplitudeField, IndexTuple, SiteWindow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Fock dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("excitation does not match a basis state")]
    UnknownExcitation,
    #[error("trajectories live on different time grids")]
    GridMismatch,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// Occupation-number basis of N bosons on K sites, ordered
/// lexicographically over occupation vectors.
#[derive(Debug, Clone)]
pub struct FockBasis {
    /// Raw site labels, ascending; occupation vectors index into this.
    pub sites: Vec<i64>,
    pub states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl FockBasis {
    pub fn new(spec: &LatticeSpec, n_bosons: u32, cap: usize) -> Result<Self, OracleError> {
        let sites: Vec<i64> = (spec.site_min()..=spec.site_max()).collect();
        let k = sites.len();
        let dim = binomial(k as u64 + n_bosons as u64 - 1, n_bosons as u64) as usize;
        if dim > cap {
            return Err(OracleError::DimensionCap { dim, cap });
        }
        let mut states = Vec::with_capacity(dim);
        let mut occ = vec![0u32; k];
        fn fill(states: &mut Vec<Vec<u32>>, occ: &mut Vec<u32>, pos: usize, left: u32) {
            if pos + 1 == occ.len() {
                occ[pos] = left;
                states.push(occ.clone());
                occ[pos] = 0;
                return;
            }
            for c in 0..=left {
                occ[pos] = c;
                fill(states, occ, pos + 1, left - c);
                occ[pos] = 0;
            }
        }
        fill(&mut states, &mut occ, 0, n_bosons);
        debug_assert_eq!(states.len(), dim);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(FockBasis {
            sites,
            states,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn position_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    /// Occupation vector of a canonical site tuple.
    pub fn occupations_of(&self, tuple: &IndexTuple) -> Vec<u32> {
        let mut occ = vec![0u32; self.sites.len()];
        let lo = self.sites[0];
        for &site in tuple.lambdas() {
            occ[(site - lo) as usize] += 1;
        }
        occ
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut num = 1u64;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}

/// Sparse second-quantized Hamiltonian over the occupation basis: hopping
/// elements carry the bosonic sqrt factors, the diagonal carries U times
/// the interacting-pair count.
#[derive(Debug, Clone)]
pub struct FockHamiltonian {
    pub basis: FockBasis,
    rows: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
}

pub fn build_fock_hamiltonian(
    spec: &LatticeSpec,
    n_bosons: u32,
    cap: Option<usize>,
) -> Result<FockHamiltonian, OracleError> {
    let basis = FockBasis::new(spec, n_bosons, cap.unwrap_or(DEFAULT_DIMENSION_CAP))?;
    let k = basis.sites.len();

    // Undirected bonds, each listed once; walking +1 from every site also
    // covers the periodic wrap.
    let mut bonds: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &site) in basis.sites.iter().enumerate() {
        if let Some((nbr, amp)) = spec.neighbor(site, 1) {
            let j = (nbr - basis.sites[0]) as usize;
            if i != j {
                bonds.push((i, j, amp));
            }
        }
    }

    let has_interaction = spec.interaction.u != 0.0;
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); basis.dim()];
    let mut diag = vec![0.0f64; basis.dim()];
    let mut moved = vec![0u32; k];
    for (s, occ) in basis.states.iter().enumerate() {
        if has_interaction {
            let mut pot = 0.0;
            for a in 0..k {
                if occ[a] == 0 {
                    continue;
                }
                let pa = spec
                    .pair_potential(basis.sites[a], basis.sites[a])
                    .expect("sites inside window");
                pot += pa * (occ[a] * (occ[a] - 1)) as f64 / 2.0;
                for b in (a + 1)..k {
                    if occ[b] == 0 {
                        continue;
                    }
                    let pab = spec
                        .pair_potential(basis.sites[a], basis.sites[b])
                        .expect("sites inside window");
                    pot += pab * (occ[a] * occ[b]) as f64;
                }
            }
            diag[s] = pot;
        }
        for &(a, b, amp) in &bonds {
            for (from, to) in [(a, b), (b, a)] {
                if occ[from] == 0 {
                    continue;
                }
                moved.copy_from_slice(occ);
                moved[from] -= 1;
                moved[to] += 1;
                let target = basis.position_of(&moved).expect("boson number conserved");
                let element = amp * ((occ[from] as f64) * (occ[to] as f64 + 1.0)).sqrt();
                rows[target].push((s as u32, element));
            }
        }
    }

    Ok(FockHamiltonian { basis, rows, diag })
}

impl FockHamiltonian {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn apply(&self, out: &mut [C64], v: &[C64]) {
        for row in 0..self.dim() {
            let mut acc = v[row] * self.diag[row];
            for &(col, amp) in &self.rows[row] {
                acc += v[col as usize] * amp;
            }
            out[row] = acc;
        }
    }

    pub fn infinity_norm(&self) -> f64 {
        (0..self.dim())
            .map(|r| {
                self.diag[r].abs() + self.rows[r].iter().map(|(_, a)| a.abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = self.diag[r];
            for &(c, a) in &self.rows[r] {
                m[(r, c as usize)] += a;
            }
        }
        m
    }

    /// Sorted eigenvalues via dense diagonalization.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .to_dense()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }
}

/// Fock amplitudes sampled along a driven evolution.
#[derive(Debug, Clone)]
pub struct FockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
}

/// Drive the Fock system with the same Gaussian pulse as the synthetic
/// lattice: the source acts on the single occupation state matching the
/// excitation, weighted by sqrt(N!/prod xi!) so the two trajectories are
/// directly comparable through the amplitude conversion.
pub fn evolve_fock(
    h: &FockHamiltonian,
    excitation: &ExcitationSpec,
    params: &EvolveParams,
) -> Result<FockTrajectory, OracleError> {
    let tuple = IndexTuple::from_unsorted(excitation.site_multiset());
    let occ = h.basis.occupations_of(&tuple);
    let target = h
        .basis
        .position_of(&occ)
        .ok_or(OracleError::UnknownExcitation)?;
    let weight = tuple.conversion_factor();

    let bound = params.stability_margin / h.infinity_norm().max(f64::MIN_POSITIVE);
    if params.dt > bound {
        return Err(DynamicsError::UnstableStep {
            dt: params.dt,
            bound,
        }
        .into());
    }

    let dim = h.dim();
    let dt = params.dt;
    let steps = (params.t_end / dt).round() as usize;
    let sample_every = (params.sample_stride / dt).round().max(1.0) as usize;

    let deriv = |t: f64, state: &[C64], out: &mut [C64]| {
        h.apply(out, state);
        out[target] += source_envelope(excitation, t) * weight;
        for x in out.iter_mut() {
            *x = C64::new(x.im, -x.re);
        }
    };

    let mut v = vec![C64::new(0.0, 0.0); dim];
    let mut times = Vec::new();
    let mut states = Vec::new();
    times.push(0.0);
    states.push(v.clone());
    let mut buffers = Rk4Buffers::new(dim);
    for step in 0..steps {
        buffers.step(step as f64 * dt, dt, &mut v, &deriv);
        let done = step + 1;
        if done % sample_every == 0 || done == steps {
            times.push(done as f64 * dt);
            states.push(v.clone());
        }
    }
    Ok(FockTrajectory { times, states })
}

/// Largest deviation, over all sample times and canonical tuples, between
/// the synthetic field converted through the amplitude map and the raw
/// Fock amplitudes.
pub fn compare_trajectories(
    synthetic: &[(f64, AmplitudeField)],
    fock: &FockTrajectory,
    basis: &FockBasis,
) -> Result<f64, OracleError> {
    if synthetic.len() != fock.times.len() {
        return Err(OracleError::GridMismatch);
    }
    let mut worst = 0.0f64;
    for ((t_syn, field), (t_fock, state)) in synthetic
        .iter()
        .zip(fock.times.iter().zip(&fock.states))
    {
        if (t_syn - t_fock).abs() > 1e-9 {
            return Err(OracleError::GridMismatch);
        }
        synth::for_each_canonical(field.window(), field.n_bosons(), |tuple| {
            let t = IndexTuple::new(tuple.to_vec()).expect("canonical");
            let u = synth::v_to_u(field, &t);
            let occ = basis.occupations_of(&t);
            let a = state[basis.position_of(&occ).expect("same window")];
            worst = worst.max((u - a).norm());
        });
    }
    Ok(worst)
}

/// Synthetic-side counterpart for [`compare_trajectories`]: runs the
/// driven synthetic evolution and returns snapshots on the same sample
/// grid as [`evolve_fock`].
pub fn synthetic_snapshots(
    spec: &LatticeSpec,
    n_bosons: usize,
    excitation: &ExcitationSpec,
    params: &EvolveParams,
) -> Result<Vec<(f64, AmplitudeField)>, DynamicsError> {
    let op = crate::synth::SyntheticOperator::build(spec, n_bosons)
        .map_err(|e| DynamicsError::BadParams(e.to_string()))?;
    let source = SourceTerm::new(excitation.clone(), spec, n_bosons)?;
    let dt = params.dt;
    let steps = (params.t_end / dt).round() as usize;
    let sample_every = (params.sample_stride / dt).round().max(1.0) as usize;
    let mut snapshot_times: Vec<f64> = (0..=steps)
        .filter(|&s| s % sample_every == 0 || s == steps)
        .map(|s| s as f64 * dt)
        .collect();
    snapshot_times.dedup();
    let run_params = params.clone().with_snapshots(snapshot_times);
    let result = crate::dynamics::evolve(&op, &source, &run_params)?;
    Ok(result.snapshots)
}

/// Window of the basis, for building fields on the same grid.
pub fn window_of(basis: &FockBasis) -> SiteWindow {
    SiteWindow::new(basis.sites[0], *basis.sites.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;
    use crate::synth::SyntheticOperator;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_two_boson_algebra() {
        // Basis (lex): (0,2), (1,1), (2,0). Onsite-only interaction:
        // diagonal U on the doubly occupied states, hopping sqrt(2) g.
        let spec = LatticeSpec::uniform(1.0, 0, 1, Boundary::Open).with_interaction(3.0, 0);
        let h = build_fock_hamiltonian(&spec, 2, None).unwrap();
        assert_eq!(h.dim(), 3);
        let m = h.to_dense();
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(m[(0, 0)], 3.0);
        assert_abs_diff_eq!(m[(1, 1)], 0.0);
        assert_abs_diff_eq!(m[(2, 2)], 3.0);
        assert_abs_diff_eq!(m[(0, 1)], s2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)], s2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 2)], s2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 2)], 0.0);
    }

    #[test]
    fn single_site_triple_occupation_diagonal() {
        let spec = LatticeSpec::uniform(1.0, 0, 0, Boundary::Open).with_interaction(2.0, 0);
        let h = build_fock_hamiltonian(&spec, 3, None).unwrap();
        assert_eq!(h.dim(), 1);
        // (U/2) n (n-1) = 3U
        assert_abs_diff_eq!(h.diag()[0], 6.0);
    }

    #[test]
    fn fock_diagonal_matches_synthetic_onsite_potential() {
        // Exhaustive small cases: the Fock diagonal equals the pair-count
        // potential evaluated on the particle-position multiset.
        for (n, k) in [(2u32, 5i64), (3, 4), (4, 3)] {
            let spec = LatticeSpec::uniform(0.8, 0, k - 1, Boundary::Open).with_interaction(1.3, 1);
            let h = build_fock_hamiltonian(&spec, n, None).unwrap();
            for (s, occ) in h.basis.states.iter().enumerate() {
                let mut tuple = Vec::new();
                for (i, &c) in occ.iter().enumerate() {
                    for _ in 0..c {
                        tuple.push(h.basis.sites[i]);
                    }
                }
                let expect = synth::onsite_potential(&spec, &tuple).unwrap();
                assert_abs_diff_eq!(h.diag()[s], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fock_matrix_is_hermitian() {
        let spec = LatticeSpec::ssh(1.3, 0.6, 0, 3, Boundary::Periodic).with_interaction(0.9, 1);
        let h = build_fock_hamiltonian(&spec, 3, None).unwrap();
        let m = h.to_dense();
        assert_eq!(m.clone(), m.transpose());
    }

    #[test]
    fn spectrum_matches_symmetric_sector() {
        let spec = LatticeSpec::ssh(1.1, 0.4, 0, 3, Boundary::Open).with_interaction(2.0, 1);
        let fock = build_fock_hamiltonian(&spec, 2, None).unwrap();
        let op = SyntheticOperator::build(&spec, 2).unwrap();
        let (_, sym) = op.symmetric_sector_matrix();
        let mut sym_eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().cloned().collect();
        sym_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let fock_eigs = fock.spectrum();
        assert_eq!(sym_eigs.len(), fock_eigs.len());
        for (a, b) in sym_eigs.iter().zip(&fock_eigs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_boson_mapping_is_identity() {
        let spec = LatticeSpec::uniform(1.0, 0, 7, Boundary::Open);
        let exc = ExcitationSpec::new([(3, 1)], 0.7, 3.0, 2.0);
        let params = EvolveParams::new(12.0, 0.01);
        let h = build_fock_hamiltonian(&spec, 1, None).unwrap();
        let fock = evolve_fock(&h, &exc, &params).unwrap();
        let snaps = synthetic_snapshots(&spec, 1, &exc, &params).unwrap();
        let dev = compare_trajectories(&snaps, &fock, &h.basis).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn dimension_cap_enforced() {
        let spec = LatticeSpec::uniform(1.0, 0, 30, Boundary::Open);
        assert!(matches!(
            build_fock_hamiltonian(&spec, 4, Some(100)),
            Err(OracleError::DimensionCap { .. })
        ));
    }

    #[test]
    fn zero_source_is_zero() {
        let spec = LatticeSpec::uniform(1.0, 0, 3, Boundary::Open);
        let mut exc = ExcitationSpec::new([(0, 2)], 0.0, 2.0, 1.0);
        exc.eta0 = 0.0;
        let h = build_fock_hamiltonian(&spec, 2, None).unwrap();
        let traj = evolve_fock(&h, &exc, &EvolveParams::new(8.0, 0.01)).unwrap();
        for s in &traj.states {
            assert!(s.iter().all(|a| a.norm() == 0.0));
        }
    }
}
