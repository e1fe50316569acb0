//! Eigenvalue localization: coarse candidates from Fourier collocation,
//! refinement by a Newton search on `a(λ) = 0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pulse::SampledPulse;
use crate::scattering::{a_with_derivative, spectral_coefficients};
use crate::Complex64;

/// Parameters of the Fourier-collocation eigenproblem.
#[derive(Clone, Copy, Debug)]
pub struct CollocationConfig {
    /// Fourier modes retained per component; the dense matrix has size
    /// `2(2K+1)`.
    pub modes: usize,
    /// Periodization length; must cover the pulse duration.
    pub period: f64,
    /// Candidates with Im λ at or below this floor are dropped (continuum
    /// artifacts cluster on the real axis).
    pub im_floor: f64,
    /// Candidates whose scattering residual `|a(λ)|` exceeds this ceiling
    /// are dropped as spurious.
    pub residual_ceiling: f64,
}

impl CollocationConfig {
    /// Defaults sized from a pulse: `K = min(M/2, 128)` modes and the pulse
    /// duration plus four widths of the slowest expected soliton decay
    /// (σ = 0.5) as the period.
    pub fn for_pulse(pulse: &SampledPulse) -> Self {
        Self {
            modes: (pulse.len() / 2).clamp(1, 128),
            period: pulse.duration() + 4.0 / (2.0 * 0.5),
            im_floor: 1e-3,
            residual_ceiling: 1e-2,
        }
    }

    pub fn validate(&self, pulse: &SampledPulse) -> Result<()> {
        if self.modes < 1 {
            return Err(Error::InvalidInput("collocation needs K >= 1".into()));
        }
        if !(self.period > 0.0) || self.period < pulse.duration() {
            return Err(Error::InvalidInput(format!(
                "collocation period {} must cover the pulse duration {}",
                self.period,
                pulse.duration()
            )));
        }
        if !(self.im_floor > 0.0) {
            return Err(Error::InvalidInput("im_floor must be positive".into()));
        }
        Ok(())
    }
}

/// Controls of the Newton refinement.
#[derive(Clone, Copy, Debug)]
pub struct NewtonConfig {
    /// Stop once `|Δλ|` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Step scale in (0, 1]; halved on steps leaving the upper half plane.
    pub damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 30,
            damping: 1.0,
        }
    }
}

/// Outcome of a converged Newton refinement.
#[derive(Clone, Copy, Debug)]
pub struct NewtonResult {
    pub lambda: Complex64,
    /// `|a(λ)|` at the refined eigenvalue.
    pub residual: f64,
    pub iterations: usize,
}

/// Coarse eigenvalue candidates of the Zakharov–Shabat system by Fourier
/// collocation on period `L`.
///
/// The ZSS is recast as `λv = [[j∂_t, −jq], [−jq*, −j∂_t]]v` and expanded
/// in `2K+1` Fourier modes per component; the eigenvalues of the resulting
/// dense non-self-adjoint matrix approximate the discrete spectrum (plus
/// continuum artifacts near the real axis, removed by the Im floor and the
/// scattering-residual ceiling).
pub fn fourier_collocation(
    pulse: &SampledPulse,
    config: &CollocationConfig,
) -> Result<Vec<Complex64>> {
    config.validate(pulse)?;
    let k = config.modes as isize;
    let n = (2 * k + 1) as usize;
    let l = config.period;
    let k0 = 2.0 * std::f64::consts::PI / l;
    let h = pulse.step();

    // Fourier coefficients of q on period L for offsets −2K..=2K
    let coeff = |d: isize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &q) in pulse.samples().iter().enumerate() {
            let t = pulse.time(m);
            acc += q * (-Complex64::i() * (k0 * d as f64) * t).exp();
        }
        acc * (h / l)
    };
    let coeffs: Vec<Complex64> = (-2 * k..=2 * k).map(coeff).collect();
    let c = |d: isize| coeffs[(d + 2 * k) as usize];

    let mut a = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    let j = Complex64::i();
    for i in 0..n {
        let ki = i as isize - k;
        a[(i, i)] = (-k0 * ki as f64).into();
        a[(n + i, n + i)] = (k0 * ki as f64).into();
        for jj in 0..n {
            let kj = jj as isize - k;
            let d = ki - kj;
            a[(i, n + jj)] = -j * c(d);
            a[(n + i, jj)] = -j * c(-d).conj();
        }
    }

    let eigen = a.eigenvalues().ok_or(Error::EigensolverFailure)?;
    let mut candidates: Vec<Complex64> = eigen
        .iter()
        .copied()
        .filter(|lam| lam.im > config.im_floor)
        .collect();
    candidates.sort_by(|a, b| {
        (a.im, a.re)
            .partial_cmp(&(b.im, b.re))
            .expect("finite eigenvalues")
    });
    candidates.dedup_by(|a, b| (*a - *b).norm() < 1e-6);
    candidates.retain(|&lam| spectral_coefficients(pulse, lam).0.norm() < config.residual_ceiling);
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    Ok(candidates)
}

/// Refine an eigenvalue estimate by damped Newton iteration on `a(λ) = 0`.
///
/// Steps that would leave the upper half plane are retried with halved
/// damping; if no admissible step remains the search fails with
/// [`Error::LeftHalfPlane`].
pub fn newton_refine(
    pulse: &SampledPulse,
    lambda0: Complex64,
    config: &NewtonConfig,
) -> Result<NewtonResult> {
    if !(lambda0.im > 0.0) {
        return Err(Error::InvalidInput(format!(
            "starting point {lambda0} is not in the upper half plane"
        )));
    }
    let mut lambda = lambda0;
    for iteration in 1..=config.max_iter {
        let (a, da) = a_with_derivative(pulse, lambda);
        if da.norm() == 0.0 {
            return Err(Error::NoConvergence {
                lambda,
                residual: a.norm(),
                iterations: iteration,
            });
        }
        let full_step = a / da;
        let mut scale = config.damping;
        let mut next = lambda - scale * full_step;
        let mut halvings = 0;
        while !(next.im > 0.0) {
            scale *= 0.5;
            next = lambda - scale * full_step;
            halvings += 1;
            if halvings > 60 {
                return Err(Error::LeftHalfPlane { lambda: next });
            }
        }
        let moved = (scale * full_step).norm();
        lambda = next;
        if moved < config.tol {
            let (a_final, _) = a_with_derivative(pulse, lambda);
            return Ok(NewtonResult {
                lambda,
                residual: a_final.norm(),
                iterations: iteration,
            });
        }
    }
    let residual = spectral_coefficients(pulse, lambda).0.norm();
    Err(Error::NoConvergence {
        lambda,
        residual,
        iterations: config.max_iter,
    })
}
