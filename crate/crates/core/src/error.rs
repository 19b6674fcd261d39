//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("phase-space dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite component encountered")]
    NonFinite,

    #[error("mode index {index} out of range for {n_modes} modes")]
    IndexOutOfRange { index: usize, n_modes: usize },

    #[error("basis is not symplectically orthonormal (max deviation {max_dev:.3e})")]
    NonOrthonormalBasis { max_dev: f64 },

    #[error("input does not span a symplectic subspace (restricted Gram condition {cond:.3e})")]
    NonSymplecticSubspace { cond: f64 },

    #[error("covariance matrix is not symmetric (max asymmetry {max_dev:.3e})")]
    NonSymmetricSigma { max_dev: f64 },

    #[error("unphysical covariance: smallest symplectic eigenvalue {nu_min:.12} < 1")]
    Unphysical { nu_min: f64 },

    #[error("state is not pure (||J^2 + I||_max = {deviation:.3e})")]
    NotPure { deviation: f64 },

    #[error("subsystem is uncorrelated; no partner mode exists")]
    UncorrelatedSubsystem,

    #[error("reduced state is too close to pure (det J_A = {det_j:.12}); partner normalization is singular")]
    NearPureReduction { det_j: f64 },

    #[error("subsystems are not symplectically independent (max cross product {max_cross:.3e})")]
    OverlappingSubsystems { max_cross: f64 },

    #[error(
        "two-mode blocks are inconsistent: delta_tilde^2 - 4 det J_AB = {discriminant:.3e} < 0"
    )]
    InconsistentBlocks { discriminant: f64 },

    #[error("quantity is not applicable here: {0}")]
    NotApplicable(String),

    #[error("matrix is not symplectic (||S^T Omega S - Omega||_max = {max_dev:.3e})")]
    NotSymplectic { max_dev: f64 },

    #[error("quadrature failed to converge: {what} (error estimate {estimate:.3e}, budget {panels} panels)")]
    QuadratureNonConvergence {
        what: String,
        estimate: f64,
        panels: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not enough valid samples: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },
}
