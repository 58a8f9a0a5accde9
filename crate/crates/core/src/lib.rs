//! N indistinguishable bosons on a 1D chain, mapped to a single particle on
//! an N-dimensional synthetic lattice.
//!
//! The crate provides the pieces needed to reproduce and predict multi-boson
//! phenomena on tight-binding and alternating (SSH-type) chains with
//! finite-range density-density interactions:
//!
//! - [`model`]: the hosting chain (couplings, interaction, window, boundary)
//!   and excitation sources;
//! - [`synth`]: the amplitude field over the N-fold grid, the sparse
//!   synthetic-lattice operator, and field observables;
//! - [`bloch`]: analytic band formulas and projected band structures of
//!   stripe geometries (axis-aligned and centre-of-mass diagonal);
//! - [`spectra`]: dense Hermitian eigendecomposition plus physical
//!   classification (edge/interface localization, exchange parity, bound-state
//!   regions);
//! - [`dynamics`]: driven time evolution with a Gaussian source and
//!   time-resolved observables;
//! - [`oracle`]: brute-force Fock-space evolution and diagonalization, the
//!   independent ground truth for everything above.

pub mod bloch;
pub mod dynamics;
pub mod model;
pub mod oracle;
pub mod spectra;
pub mod synth;

pub use model::{Boundary, CouplingPattern, ExcitationSpec, InteractionSpec, LatticeSpec};
pub use synth::{AmplitudeField, IndexTuple, SiteWindow, SyntheticOperator};
