//! The discrete nonlinear spectrum `{(λ_k, b_k)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

/// One eigenvalue / spectral-amplitude pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    /// Eigenvalue `λ = ω + jσ`, Im λ > 0.
    pub lambda: Complex64,
    /// Spectral amplitude `b = b(λ)`.
    pub b: Complex64,
}

/// Ordered list of `(λ_k, b_k)` pairs with all eigenvalues in the upper
/// half plane and pairwise distinct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectrum {
    entries: Vec<SpectralPoint>,
}

impl DiscreteSpectrum {
    pub fn new(entries: Vec<(Complex64, Complex64)>) -> Result<Self> {
        for &(lambda, b) in &entries {
            if !(lambda.im > 0.0) || !lambda.re.is_finite() || !lambda.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "eigenvalue {lambda} is not in the open upper half plane"
                )));
            }
            if b.norm() == 0.0 || !b.re.is_finite() || !b.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "spectral amplitude {b} at {lambda} must be finite and nonzero"
                )));
            }
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if entries[i].0 == entries[j].0 {
                    return Err(Error::DuplicateEigenvalue(entries[i].0));
                }
            }
        }
        Ok(Self {
            entries: entries
                .into_iter()
                .map(|(lambda, b)| SpectralPoint { lambda, b })
                .collect(),
        })
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[SpectralPoint] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpectralPoint> {
        self.entries.iter()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Entries sorted by ascending Im λ, ties broken by ascending Re λ.
    pub fn sorted_ascending_im(&self) -> Vec<SpectralPoint> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| {
            (a.lambda.im, a.lambda.re)
                .partial_cmp(&(b.lambda.im, b.lambda.re))
                .expect("finite eigenvalues")
        });
        v
    }

    /// Entries sorted by descending Im λ, ties broken by ascending Re λ.
    pub fn sorted_descending_im(&self) -> Vec<SpectralPoint> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| {
            (b.lambda.im, a.lambda.re)
                .partial_cmp(&(a.lambda.im, b.lambda.re))
                .expect("finite eigenvalues")
        });
        v
    }

    /// Entry with the smallest Im λ.
    pub fn min_im_entry(&self) -> Option<SpectralPoint> {
        self.sorted_ascending_im().first().copied()
    }

    /// Evolve the spectrum a normalized distance `z` along the fiber:
    /// each `b_k` picks up `exp(−4jλ_k²z)` while the eigenvalues stay put.
    pub fn propagate(&self, z: f64) -> DiscreteSpectrum {
        let entries = self
            .entries
            .iter()
            .map(|e| SpectralPoint {
                lambda: e.lambda,
                b: e.b * (-Complex64::i() * 4.0 * e.lambda * e.lambda * z).exp(),
            })
            .collect();
        DiscreteSpectrum { entries }
    }

    /// Trace-formula energy of the corresponding multi-soliton: `4·Σ Im λ_k`.
    pub fn trace_energy(&self) -> f64 {
        4.0 * self.entries.iter().map(|e| e.lambda.im).sum::<f64>()
    }
}
