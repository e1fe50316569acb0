//! Nonlinear Fourier transform toolkit for multi-soliton pulses of the
//! focusing nonlinear Schrödinger equation.
//!
//! The crate covers both directions of the transform for reflectionless
//! (purely solitonic) signals:
//!
//! * **Synthesis** — [`darboux::synthesize`] builds the time-domain pulse
//!   whose discrete spectrum `{(λ_k, b_k)}` is prescribed, by recursive
//!   Darboux dressing of the vacuum.
//! * **Recovery** — [`ser::decompose`] runs successive eigenvalue removal:
//!   refine one eigenvalue by a Newton search on `a(λ) = 0`, estimate its
//!   spectral amplitude with forward–backward scattering, peel the
//!   eigenvalue off with the same Darboux update, truncate the shrunken
//!   pulse, and repeat. [`ser::classical_decompose`] is the conventional
//!   per-eigenvalue estimator used as a baseline.
//!
//! Supporting modules: [`scattering`] implements the discretized
//! Zakharov–Shabat system (transfer matrices, Jost solutions, spectral
//! coefficients), [`eigenfinder`] localizes eigenvalues by Fourier
//! collocation and refines them by Newton iteration, [`analysis`] carries
//! the closed-form tail/duration/separation predictions, and [`bench`]
//! holds the reproducible experiment harness behind the `soliton-nft`
//! command-line tool.
//!
//! Every operation is a pure function of immutable inputs; pulses and
//! spectra can be shared read-only across threads.

pub mod analysis;
pub mod bench;
pub mod darboux;
pub mod eigenfinder;
pub mod error;
pub mod pulse;
pub mod scattering;
pub mod ser;
pub mod spectrum;

pub use error::{Error, Result};
pub use pulse::{SampledPulse, TimeGrid};
pub use spectrum::{DiscreteSpectrum, SpectralPoint};

/// Complex scalar used throughout: samples `q_m`, nonlinear frequencies
/// `λ = ω + jσ`, and spectral coefficients all live in `C`.
pub type Complex64 = num_complex::Complex<f64>;

/// Truncation parameter ε used by the reference experiments.
pub const DEFAULT_EPSILON: f64 = 2e-4;
