//! Inverse NFT by recursive Darboux transformation.
//!
//! One Darboux step maps a pulse `q` and a solution `θ(μ; t)` of its
//! Zakharov–Shabat system to
//!
//! ```text
//! q̃ = q + 2j(μ* − μ) θ₂* θ₁ / (|θ₁|² + |θ₂|²)
//! ```
//!
//! If `μ` is not yet an eigenvalue the update adds `(μ, b)` to the discrete
//! spectrum, with `b` selected by the asymptotic ratio of `θ`; if `μ` is an
//! eigenvalue and `θ` its bound state, the update removes it. Either way
//! every other `b_k`, and `b(λ)` on the real line, is untouched, while
//! `a(λ)` gains or loses one Blaschke factor `(λ−μ)/(λ−μ*)`.
//!
//! The update is projective in `θ` sample by sample, so all auxiliary
//! solutions are kept normalized to unit max-magnitude per sample; this is
//! what makes synthesis stable for large `Im λ · T` where the raw vacuum
//! exponentials overflow.

use crate::analysis;
use crate::error::{Error, Result};
use crate::pulse::{SampledPulse, TimeGrid};
use crate::scattering::{self, JostSolution};
use crate::spectrum::DiscreteSpectrum;
use crate::{Complex64, DEFAULT_EPSILON};

/// Map from normalized NLSE units to physical fiber units.
///
/// `p(τ, ℓ) = √P₀ · q(τ/T₀, ℓ|β₂|/(2T₀²))` with `P₀T₀² = |β₂|/γ`.
#[derive(Clone, Copy, Debug)]
pub struct PhysicalScaling {
    /// Time scale T₀ in seconds.
    pub t0: f64,
    /// Chromatic dispersion β₂ in s²/m (anomalous: β₂ < 0).
    pub beta2: f64,
    /// Kerr nonlinearity γ in 1/(W·m).
    pub gamma: f64,
}

impl PhysicalScaling {
    pub fn new(t0: f64, beta2: f64, gamma: f64) -> Result<Self> {
        if !(t0 > 0.0) || !(gamma > 0.0) || !(beta2 < 0.0) {
            return Err(Error::InvalidInput(format!(
                "physical scaling needs T0 > 0, gamma > 0, beta2 < 0; got {t0}, {gamma}, {beta2}"
            )));
        }
        Ok(Self { t0, beta2, gamma })
    }

    /// Peak-power scale `P₀ = |β₂|/(γT₀²)` in watts.
    pub fn peak_power(&self) -> f64 {
        self.beta2.abs() / (self.gamma * self.t0 * self.t0)
    }
}

/// Rescale a normalized pulse to physical units: amplitude by `√P₀`
/// (units √W), time axis by `T₀` (units s).
pub fn to_physical(pulse: &SampledPulse, scaling: &PhysicalScaling) -> SampledPulse {
    let amp = scaling.peak_power().sqrt();
    let samples = pulse.samples().iter().map(|q| q * amp).collect();
    SampledPulse::new(pulse.t_start() * scaling.t0, pulse.step() * scaling.t0, samples)
        .expect("scaling a valid pulse preserves validity")
}

/// Normalize a 2-vector to unit max-magnitude. Returns `None` on zero or
/// non-finite input.
fn normalized(v: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let scale = v[0].norm().max(v[1].norm());
    if scale > 0.0 && scale.is_finite() {
        Some([v[0] / scale, v[1] / scale])
    } else {
        None
    }
}

/// Vacuum seed solution for eigenvalue `λ` with target amplitude `b`:
/// `θ ∝ (e^{−jλt}, −b e^{jλt})`, normalized per sample. Both exponents are
/// shifted by their common max real part before exponentiating, so large
/// `Im λ · t` cannot overflow.
fn vacuum_seed(lambda: Complex64, b: Complex64, grid: &TimeGrid) -> Vec<[Complex64; 2]> {
    let ln_b = b.ln();
    (0..grid.len)
        .map(|m| {
            let t = grid.time(m);
            let e1 = -Complex64::i() * lambda * t;
            let e2 = Complex64::i() * lambda * t + ln_b;
            let shift = e1.re.max(e2.re);
            [
                (e1 - shift).exp(),
                -((e2 - shift).exp()),
            ]
        })
        .collect()
}

/// Pulse increment of one Darboux step from a per-sample-normalized
/// solution `theta` at `mu`.
fn dressing_increment(theta: &[Complex64; 2], mu: Complex64) -> Complex64 {
    let factor = Complex64::i() * 2.0 * (mu.conj() - mu); // = 4 Im μ
    let den = theta[0].norm_sqr() + theta[1].norm_sqr();
    factor * theta[1].conj() * theta[0] / den
}

/// Apply the dressing matrix `D(λ) = (λ − μ*)I + (μ* − μ)P_θ` built from
/// the used solution `theta` to another auxiliary solution `v`.
fn dress(v: [Complex64; 2], theta: &[Complex64; 2], mu: Complex64, lambda: Complex64) -> [Complex64; 2] {
    let den = theta[0].norm_sqr() + theta[1].norm_sqr();
    let proj = (theta[0].conj() * v[0] + theta[1].conj() * v[1]) / den;
    let c1 = lambda - mu.conj();
    let c2 = mu.conj() - mu;
    [
        c1 * v[0] + c2 * proj * theta[0],
        c1 * v[1] + c2 * proj * theta[1],
    ]
}

/// Synthesize the multi-soliton whose discrete spectrum is `spectrum`,
/// sampled on `grid`.
///
/// Eigenvalues are added one at a time in increasing order of Im λ; each
/// addition dresses the remaining vacuum seeds with the Darboux matrix of
/// the used solution, which keeps them exact solutions of the grown pulse.
/// Fails with [`Error::GridTooSmall`] when the grid does not cover the
/// predicted effective support of the full spectrum (threshold parameter
/// [`DEFAULT_EPSILON`]).
pub fn synthesize(spectrum: &DiscreteSpectrum, grid: &TimeGrid) -> Result<SampledPulse> {
    if spectrum.is_empty() {
        return Ok(SampledPulse::zeros(grid));
    }
    let (need_lo, need_hi) = analysis::support_estimate(spectrum, DEFAULT_EPSILON);
    let slack = grid.step;
    if grid.t_start > need_lo + slack || grid.t_end() < need_hi - slack {
        return Err(Error::GridTooSmall {
            have_start: grid.t_start,
            have_end: grid.t_end(),
            need_start: need_lo,
            need_end: need_hi,
        });
    }

    let order = spectrum.sorted_ascending_im();
    let mut seeds: Vec<Vec<[Complex64; 2]>> = order
        .iter()
        .map(|e| vacuum_seed(e.lambda, e.b, grid))
        .collect();
    let mut q = vec![Complex64::new(0.0, 0.0); grid.len];

    for n in 0..order.len() {
        let mu = order[n].lambda;
        let (used, rest) = {
            let (head, tail) = seeds.split_at_mut(n + 1);
            (&head[n], tail)
        };
        for (m, qm) in q.iter_mut().enumerate() {
            *qm += dressing_increment(&used[m], mu);
        }
        for (l, seed) in rest.iter_mut().enumerate() {
            let lambda = order[n + 1 + l].lambda;
            for (m, v) in seed.iter_mut().enumerate() {
                let dressed = dress(*v, &used[m], mu, lambda);
                *v = normalized(dressed).ok_or(Error::VanishingDenominator { index: m })?;
            }
        }
    }

    SampledPulse::new(grid.t_start, grid.step, q)
}

/// Time grid covering the predicted support of `spectrum` at truncation
/// parameter `epsilon`, padded 10% on each side, with `len` samples.
pub fn grid_for_spectrum(
    spectrum: &DiscreteSpectrum,
    epsilon: f64,
    len: usize,
) -> Result<TimeGrid> {
    if spectrum.is_empty() {
        return Err(Error::InvalidInput("empty spectrum has no support".into()));
    }
    let (lo, hi) = analysis::support_estimate(spectrum, epsilon);
    let span = hi - lo;
    TimeGrid::spanning(0.5 * (lo + hi), 1.2 * span, len)
}

/// One Darboux update of `pulse` from the solution `theta` at `mu`.
///
/// With `mu` an eigenvalue and `theta` its bound state this removes the
/// eigenvalue; the remaining spectrum is unchanged.
pub fn darboux_update(
    pulse: &SampledPulse,
    theta: &JostSolution,
    mu: Complex64,
) -> Result<SampledPulse> {
    if theta.values.len() != pulse.len() {
        return Err(Error::InvalidInput(format!(
            "theta has {} samples, pulse has {}",
            theta.values.len(),
            pulse.len()
        )));
    }
    let mut samples = Vec::with_capacity(pulse.len());
    for (m, (&q, v)) in pulse.samples().iter().zip(&theta.values).enumerate() {
        let n = normalized(*v).ok_or(Error::VanishingDenominator { index: m })?;
        samples.push(q + dressing_increment(&n, mu));
    }
    SampledPulse::new(pulse.t_start(), pulse.step(), samples)
}

/// Remove the (refined) eigenvalue `lambda_hat` from `pulse`: run
/// forward–backward scattering with split index `p`, stitch the bound
/// state, apply the Darboux update. Returns the reduced pulse and the
/// estimated spectral amplitude `b̂`.
pub fn remove_eigenvalue(
    pulse: &SampledPulse,
    lambda_hat: Complex64,
    p: usize,
) -> Result<(SampledPulse, Complex64)> {
    let run = scattering::scattering_run(pulse, lambda_hat, p)?;
    let (_a_hat, b_hat) = run.fb_coefficients()?;
    let theta = run.jost_solution(pulse, b_hat, scattering::DEFAULT_STITCH_TOL)?;
    let reduced = darboux_update(pulse, &theta, lambda_hat)?;
    Ok((reduced, b_hat))
}

/// Add the pair `(lambda, b)` to the discrete spectrum of `pulse`.
///
/// The auxiliary solution enforcing `b` is the combination `w − b·u` of the
/// forward and backward scattering solutions; on the vacuum it reduces to
/// the seed `(e^{−jλt}, −b e^{jλt})`.
pub fn add_eigenvalue(
    pulse: &SampledPulse,
    lambda: Complex64,
    b: Complex64,
    p: usize,
) -> Result<SampledPulse> {
    if b.norm() == 0.0 {
        return Err(Error::InvalidInput("spectral amplitude must be nonzero".into()));
    }
    let run = scattering::scattering_run(pulse, lambda, p)?;
    let h = pulse.step();
    let values = (0..pulse.len())
        .map(|m| {
            let t = pulse.time(m);
            let w = run.forward[m];
            let u = run.backward[m];
            let v = [w[0] - b * u[0], w[1] - b * u[1]];
            // edge t_m − h/2 → sample center t_m
            let v = scattering::transfer_matrix(pulse.samples()[m], t, 0.5 * h, lambda).apply(v);
            let phase = Complex64::i() * lambda * t;
            [v[0] * (-phase).exp(), v[1] * phase.exp()]
        })
        .collect();
    let theta = JostSolution {
        lambda,
        values,
        split_index: p,
        stitch_error: 0.0,
    };
    darboux_update(pulse, &theta, lambda)
}
