//! Error type shared by all modules.

use crate::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or operation received structurally invalid input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two prescribed eigenvalues coincide exactly.
    #[error("duplicate eigenvalue {0}")]
    DuplicateEigenvalue(Complex64),

    /// The synthesis grid does not cover the predicted pulse support.
    #[error("grid [{have_start}, {have_end}] does not cover the predicted support [{need_start}, {need_end}]")]
    GridTooSmall {
        have_start: f64,
        have_end: f64,
        need_start: f64,
        need_end: f64,
    },

    /// No sample exceeds the requested envelope threshold.
    #[error("every sample is below the threshold {threshold}")]
    AllBelowThreshold { threshold: f64 },

    /// `u₂` at the split index is too small for a stable `b` estimate.
    #[error("degenerate division at split index {split_index}: |u2| = {magnitude:.3e}")]
    DegenerateDivision { split_index: usize, magnitude: f64 },

    /// The forward and backward Jost branches disagree at the split index,
    /// i.e. λ is not an eigenvalue of the pulse or the sampling is too coarse.
    #[error("Jost branches mismatch at the split index: relative error {relative:.3e} exceeds {tolerance:.3e}")]
    StitchMismatch { relative: f64, tolerance: f64 },

    /// `|θ₁|² + |θ₂|²` underflowed at a sample of a Darboux update.
    #[error("vanishing denominator in Darboux update at sample {index}")]
    VanishingDenominator { index: usize },

    /// The dense collocation eigensolver did not converge.
    #[error("Fourier collocation eigensolver failed to converge")]
    EigensolverFailure,

    /// Collocation produced no candidate in the upper half plane.
    #[error("no eigenvalue candidates survived the filters")]
    NoCandidates,

    /// Newton iteration exhausted its budget.
    #[error("Newton search did not converge after {iterations} iterations (last λ = {lambda}, |a| = {residual:.3e})")]
    NoConvergence {
        lambda: Complex64,
        residual: f64,
        iterations: usize,
    },

    /// Newton iteration escaped the upper half plane and could not recover.
    #[error("Newton step left the upper half plane at λ = {lambda}")]
    LeftHalfPlane { lambda: Complex64 },

    /// Decomposition was asked to run without any eigenvalue guess.
    #[error("empty eigenvalue guess list")]
    EmptyGuessList,

    /// Unknown scattering scheme name.
    #[error("unknown scattering scheme {0:?}")]
    UnknownScheme(String),

    /// A data file does not match the expected format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
