//! Dense Hermitian eigendecomposition and the physical classification of
//! eigenstates: boundary/interface localization, exchange parity, and the
//! four-category diagram of three-boson bound states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::bloch::{BandStructure, StripeGeometry, StripeKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("matrix is not Hermitian (deviation {dev:.3e} vs scale {scale:.3e})")]
    NotHermitian { dev: f64, scale: f64 },
    #[error("matrix is empty or not square")]
    NotSquare,
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("eigenpair residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualExceeded { residual: f64, bound: f64 },
    #[error("empty region")]
    EmptyRegion,
    #[error("band structures live on different k grids")]
    GridMismatch,
    #[error("geometry does not support this classification: {0}")]
    UnsupportedGeometry(String),
}

/// One eigenvalue with its normalized eigenvector.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub energy: f64,
    pub vector: DVector<C64>,
}

/// Relative Hermiticity deviation accepted by [`hermitian_eig`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Relative eigen-residual bound enforced by [`hermitian_eig`].
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Norm threshold separating symmetric/antisymmetric from mixed parity.
pub const PARITY_TOL: f64 = 1e-6;
/// Energy gap below which eigenpairs count as degenerate for the
/// parity-resolving subspace rotation.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Cells from a window edge counted as the boundary shell.
pub const EDGE_SHELL_CELLS: i64 = 2;
/// Weight a mode must carry in the boundary shell to be called an edge mode.
pub const EDGE_WEIGHT_THRESHOLD: f64 = 0.9;
/// Cells around |l| = R counted as the interface shell.
pub const INTERFACE_SHELL_CELLS: i64 = 2;
/// Weight a mode must carry in the interface shell to be called an
/// interface mode.
pub const INTERFACE_WEIGHT_THRESHOLD: f64 = 0.8;

/// All eigenpairs of a dense Hermitian matrix, energies ascending,
/// eigenvectors orthonormal. Rejects non-Hermitian input and verifies the
/// residual of every returned pair. Backed by faer's self-adjoint
/// eigendecomposition.
pub fn hermitian_eig(h: &DMatrix<C64>) -> Result<Vec<EigenPair>, SpectraError> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(SpectraError::NotSquare);
    }
    let mut scale = 0.0f64;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(h[(i, j)].norm());
            dev = dev.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    if dev > HERMITICITY_TOL * scale {
        return Err(SpectraError::NotHermitian { dev, scale });
    }

    let mut fh = faer::Mat::<faer::c64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let z = h[(i, j)];
            fh[(i, j)] = faer::c64::new(z.re, z.im);
        }
    }
    let evd = fh
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| SpectraError::NoConvergence)?;
    let s = evd.S();
    let u = evd.U();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.partial_cmp(&s[b].re).unwrap());

    let mut pairs = Vec::with_capacity(n);
    for &j in &order {
        pairs.push(EigenPair {
            energy: s[j].re,
            vector: DVector::from_iterator(n, (0..n).map(|i| C64::new(u[(i, j)].re, u[(i, j)].im))),
        });
    }

    let h_norm = pairs
        .iter()
        .map(|p| p.energy.abs())
        .fold(0.0f64, f64::max)
        .max(scale);
    let bound = RESIDUAL_TOL * h_norm.max(f64::MIN_POSITIVE);
    let hu = &fh * u;
    for j in 0..n {
        let e = s[j].re;
        let mut r2 = 0.0;
        for i in 0..n {
            let dre = hu[(i, j)].re - e * u[(i, j)].re;
            let dim = hu[(i, j)].im - e * u[(i, j)].im;
            r2 += dre * dre + dim * dim;
        }
        let residual = r2.sqrt();
        if residual > bound {
            return Err(SpectraError::ResidualExceeded { residual, bound });
        }
    }
    Ok(pairs)
}

/// Convenience wrapper for real symmetric matrices.
pub fn hermitian_eig_real(h: &DMatrix<f64>) -> Result<Vec<EigenPair>, SpectraError> {
    hermitian_eig(&h.map(|x| C64::new(x, 0.0)))
}

/// Probability weight of an eigenvector inside a set of supercell sites.
pub fn localization_weight(pair: &EigenPair, region: &[usize]) -> Result<f64, SpectraError> {
    if region.is_empty() {
        return Err(SpectraError::EmptyRegion);
    }
    Ok(region.iter().map(|&i| pair.vector[i].norm_sqr()).sum())
}

/// Merge sorted energies into quasi-continuum intervals, splitting where
/// consecutive values are farther apart than `split`.
pub fn cluster_intervals(sorted: &[f64], split: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut iter = sorted.iter();
    let Some(&first) = iter.next() else {
        return out;
    };
    let (mut lo, mut hi) = (first, first);
    for &e in iter {
        if e - hi > split {
            out.push((lo, hi));
            lo = e;
        }
        hi = e;
    }
    out.push((lo, hi));
    out
}

fn interval_distance(x: f64, (lo, hi): (f64, f64)) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// Flags eigenvalues of `bands` lying outside every bulk interval by more
/// than `margin`, per k point. Bulk intervals are clustered from the
/// reference energies at the same k with the same `margin` as split.
pub fn detect_gap_modes(
    bands: &BandStructure,
    bulk_reference: &BandStructure,
    margin: f64,
) -> Result<Vec<(usize, usize)>, SpectraError> {
    if bands.k_grid.len() != bulk_reference.k_grid.len()
        || bands
            .k_grid
            .iter()
            .zip(&bulk_reference.k_grid)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(SpectraError::GridMismatch);
    }
    let mut flagged = Vec::new();
    for (ki, energies) in bands.energies.iter().enumerate() {
        let intervals = cluster_intervals(&bulk_reference.energies[ki], margin);
        for (bi, &e) in energies.iter().enumerate() {
            let dist = intervals
                .iter()
                .map(|&iv| interval_distance(e, iv))
                .fold(f64::INFINITY, f64::min);
            if dist > margin {
                flagged.push((ki, bi));
            }
        }
    }
    Ok(flagged)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
    Mixed,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
            Parity::Mixed => "mixed",
        }
    }
}

/// Apply a permutation-with-winding reflection to a supercell vector at
/// longitudinal momentum `k_j`: (Pv)[i] = exp(i q_i k_j) v[p_i].
pub fn apply_reflection(v: &DVector<C64>, reflection: &[(usize, i64)], k_j: f64) -> DVector<C64> {
    DVector::from_iterator(
        v.len(),
        reflection.iter().map(|&(p, q)| {
            let phase = q as f64 * k_j;
            v[p] * C64::new(phase.cos(), phase.sin())
        }),
    )
}

/// Exchange parity of a single eigenvector under the geometry's boson
/// reflection map.
pub fn parity_classify(
    pair: &EigenPair,
    reflection: &[(usize, i64)],
    k_j: f64,
) -> Parity {
    let pv = apply_reflection(&pair.vector, reflection, k_j);
    if (&pair.vector - &pv).norm() < PARITY_TOL {
        Parity::Symmetric
    } else if (&pair.vector + &pv).norm() < PARITY_TOL {
        Parity::Antisymmetric
    } else {
        Parity::Mixed
    }
}

/// Parity classification of a full spectrum. Eigenvectors inside each
/// degenerate group (energy gap below `degeneracy_tol`) are first rotated
/// into parity eigenvectors, so exactly symmetric operators never yield
/// `Mixed` labels.
pub fn resolve_parity(
    pairs: &[EigenPair],
    reflection: &[(usize, i64)],
    k_j: f64,
    degeneracy_tol: f64,
) -> Vec<(EigenPair, Parity)> {
    let mut out: Vec<(EigenPair, Parity)> = Vec::with_capacity(pairs.len());
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].energy - pairs[end - 1].energy <= degeneracy_tol {
            end += 1;
        }
        let group = &pairs[start..end];
        if group.len() == 1 {
            let p = parity_classify(&group[0], reflection, k_j);
            out.push((group[0].clone(), p));
        } else {
            // Diagonalize the reflection restricted to the degenerate
            // subspace; its eigenvectors have definite parity.
            let k = group.len();
            let mut g = DMatrix::<C64>::zeros(k, k);
            let reflected: Vec<DVector<C64>> = group
                .iter()
                .map(|p| apply_reflection(&p.vector, reflection, k_j))
                .collect();
            for a in 0..k {
                for b in 0..k {
                    g[(a, b)] = group[a].vector.dotc(&reflected[b]);
                }
            }
            let se = ((&g + g.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen();
            for j in 0..k {
                let mut rotated = DVector::<C64>::zeros(group[0].vector.len());
                for b in 0..k {
                    rotated += &group[b].vector * se.eigenvectors[(b, j)];
                }
                let norm = rotated.norm();
                if norm > 0.0 {
                    rotated /= C64::new(norm, 0.0);
                }
                let pair = EigenPair {
                    energy: group[j].energy,
                    vector: rotated,
                };
                let p = parity_classify(&pair, reflection, k_j);
                out.push((pair, p));
            }
        }
        start = end;
    }
    out
}

/// Physical category of an eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeCategory {
    Bulk,
    Edge,
    Interface,
    Scattering,
    DimerMonomer,
    WeakTriplon,
    TightTriplon,
}

impl ModeCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeCategory::Bulk => "bulk",
            ModeCategory::Edge => "edge",
            ModeCategory::Interface => "interface",
            ModeCategory::Scattering => "scattering",
            ModeCategory::DimerMonomer => "dimer_monomer",
            ModeCategory::WeakTriplon => "weak_triplon",
            ModeCategory::TightTriplon => "tight_triplon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeLabel {
    pub category: ModeCategory,
    pub parity: Parity,
    /// Weight fraction carried in the category's defining region.
    pub localization: f64,
}

/// Region of the (l1, l2) plane of three-boson relative coordinates: how
/// many of the three pair distances |l1|, |l2|, |l1 - l2| are within the
/// interaction range.
pub fn triplon_region(l1: i64, l2: i64, range: u32) -> ModeCategory {
    let r = range as i64;
    let within = [l1.abs(), l2.abs(), (l1 - l2).abs()]
        .iter()
        .filter(|&&d| d <= r)
        .count();
    match within {
        0 => ModeCategory::Scattering,
        1 => ModeCategory::DimerMonomer,
        2 => ModeCategory::WeakTriplon,
        _ => ModeCategory::TightTriplon,
    }
}

/// Assign a three-boson stripe eigenstate to the region category holding
/// its dominant weight.
pub fn classify_band_by_region(
    pair: &EigenPair,
    geom: &StripeGeometry,
) -> Result<ModeLabel, SpectraError> {
    if !matches!(geom.kind(), StripeKind::Diagonal { .. }) || geom.n_bosons() != 3 {
        return Err(SpectraError::UnsupportedGeometry(
            "region classification needs a 3-boson diagonal stripe".into(),
        ));
    }
    let range = geom.interaction().range;
    let mut weights = [0.0f64; 4];
    for (i, site) in geom.sites().iter().enumerate() {
        let cat = triplon_region(site.transverse[0], site.transverse[1], range);
        let slot = match cat {
            ModeCategory::Scattering => 0,
            ModeCategory::DimerMonomer => 1,
            ModeCategory::WeakTriplon => 2,
            _ => 3,
        };
        weights[slot] += pair.vector[i].norm_sqr();
    }
    let (best, &weight) = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let category = [
        ModeCategory::Scattering,
        ModeCategory::DimerMonomer,
        ModeCategory::WeakTriplon,
        ModeCategory::TightTriplon,
    ][best];
    Ok(ModeLabel {
        category,
        parity: Parity::Mixed,
        localization: weight,
    })
}

/// Full classification of one stripe eigenstate: bound-state region for
/// 3-boson diagonal stripes; interface/edge/bulk (plus exchange parity when
/// the reflection is defined) otherwise.
pub fn classify_stripe_mode(
    pair: &EigenPair,
    geom: &StripeGeometry,
    k_j: f64,
) -> ModeLabel {
    if matches!(geom.kind(), StripeKind::Diagonal { .. }) && geom.n_bosons() == 3 {
        let mut label = classify_band_by_region(pair, geom).expect("checked geometry");
        if let Ok(reflection) = geom.exchange_reflection() {
            label.parity = parity_classify(pair, &reflection, k_j);
        }
        return label;
    }

    let parity = geom
        .exchange_reflection()
        .map(|refl| parity_classify(pair, &refl, k_j))
        .unwrap_or(Parity::Mixed);

    // Interface shell: around |l| = R on diagonal stripes with interactions.
    if let StripeKind::Diagonal { .. } = geom.kind() {
        let inter = geom.interaction();
        if inter.u != 0.0 && geom.n_bosons() == 2 {
            let r = inter.range as i64;
            let shell: Vec<usize> = geom
                .sites()
                .iter()
                .enumerate()
                .filter(|(_, s)| (s.transverse[0].abs() - r).abs() <= INTERFACE_SHELL_CELLS)
                .map(|(i, _)| i)
                .collect();
            if let Ok(w) = localization_weight(pair, &shell) {
                if w > INTERFACE_WEIGHT_THRESHOLD {
                    return ModeLabel {
                        category: ModeCategory::Interface,
                        parity,
                        localization: w,
                    };
                }
            }
        }
    }

    // Boundary shell: within EDGE_SHELL_CELLS of any transverse window edge.
    let shell: Vec<usize> = geom
        .sites()
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            s.transverse
                .iter()
                .zip(geom.transverse_ranges())
                .any(|(&t, r)| t - r.lo <= EDGE_SHELL_CELLS || r.hi - t <= EDGE_SHELL_CELLS)
        })
        .map(|(i, _)| i)
        .collect();
    if let Ok(w) = localization_weight(pair, &shell) {
        if w > EDGE_WEIGHT_THRESHOLD {
            return ModeLabel {
                category: ModeCategory::Edge,
                parity,
                localization: w,
            };
        }
        return ModeLabel {
            category: ModeCategory::Bulk,
            parity,
            localization: w,
        };
    }
    ModeLabel {
        category: ModeCategory::Bulk,
        parity,
        localization: 0.0,
    }
}
