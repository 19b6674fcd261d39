//! Phase-space toolkit for bosonic Gaussian states.
//!
//! The crate works on the complexified classical phase space of an N-mode
//! bosonic system. Darboux coordinates are fixed as (x1, p1, ..., xN, pN) and
//! the symplectic form is the block-diagonal Omega = ⊕ [[0, 1], [-1, 0]].
//! Gaussian states are covariance matrices normalized so the vacuum is the
//! identity; their complex structure J = -Omega sigma carries the whole
//! correlation structure.
//!
//! On top of that the crate builds:
//!
//! - symplectic products, mode subspaces, projectors ([`phase`]),
//! - symplectic spectra, purity and correlation tests, restricted two-mode
//!   blocks and seeded random states ([`state`]),
//! - purification partner modes ([`partner`]),
//! - the mode overlap, the symmetric overlap `D^sym`, the threshold `D_c`,
//!   PPT spectra, logarithmic negativity and the two-mode entanglement
//!   criterion ([`measures`]),
//! - squeezer/beam-splitter gates and the three-oscillator worked example
//!   with its closed forms ([`circuits`]),
//! - the Minkowski-vacuum ball/shell field example reduced to radial
//!   quadrature: window transforms, vacuum pairing integrals, partner radial
//!   profiles and parameter scans ([`field`]).

pub mod circuits;
pub mod error;
pub mod field;
pub mod measures;
pub mod partner;
pub mod phase;
pub mod state;

pub use error::{Error, Result};
pub use measures::{CriterionReport, Verdict};
pub use phase::{orthonormalize, symplectic_product, ModeSubspace, PhaseVector, SymplecticForm};
pub use state::{ComplexStructure, GaussianState, StateSpec, TwoModeBlocks};

/// Tolerance policy used across the crate.
///
/// Algebraic identities on unit-scale data are checked at `ALGEBRAIC`;
/// user-facing input validation is looser (`VALIDATION`), reflecting double
/// precision arithmetic through O(10^2)-dimensional operations.
pub mod tol {
    /// Internal algebraic identities (products, projector algebra).
    pub const ALGEBRAIC: f64 = 1e-12;
    /// User-facing validation of supplied matrices and bases.
    pub const VALIDATION: f64 = 1e-9;
    /// Reality check on determinants computed from complex blocks.
    pub const DET_REALITY: f64 = 1e-10;
    /// Dead zone around the separability boundary: verdicts inside
    /// |nu_tilde_minus - 1| <= BOUNDARY (or |d_t| <= BOUNDARY) are reported
    /// as boundary, never asserted either way.
    pub const BOUNDARY: f64 = 1e-9;
    /// Condition-number limit for the restricted symplectic Gram matrix.
    pub const SYMPLECTIC_COND_LIMIT: f64 = 1e8;
}
