//! Closed-form predictions: tail envelopes, effective durations, the
//! complexity factor of successive removal, and the separation geometry of
//! an imprecisely removed eigenvalue.

use crate::error::{Error, Result};
use crate::pulse::SampledPulse;
use crate::spectrum::DiscreteSpectrum;
use crate::Complex64;

/// Which tail of the envelope an asymptote describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailSide {
    Left,
    Right,
}

/// Exponential tail envelope `|q(t)| ~ amplitude · e^{−rate·|t ∓ t_shift|}`
/// governed by the eigenvalue with the smallest imaginary part.
#[derive(Clone, Copy, Debug)]
pub struct TailAsymptote {
    pub side: TailSide,
    /// `4σ_n |b_n|^{±1}`.
    pub amplitude: f64,
    /// Decay rate `2σ_n`.
    pub rate: f64,
    /// Time shift: the right tail is centered at `+t_s`, the left at `−t_s`.
    pub t_shift: f64,
}

/// Blaschke cross-product `Π_{k≠n} (λ_n − λ_k*)/(λ_n − λ_k)` over all
/// eigenvalues other than the smallest-Im one.
fn cross_product(sorted_desc: &[crate::spectrum::SpectralPoint]) -> Complex64 {
    let n = sorted_desc.len();
    let lam_n = sorted_desc[n - 1].lambda;
    sorted_desc[..n - 1].iter().fold(Complex64::new(1.0, 0.0), |acc, e| {
        acc * (lam_n - e.lambda.conj()) / (lam_n - e.lambda)
    })
}

/// Tail shift `t_s = (1/2σ_n)·ln|Π_{k≠n}(λ_n−λ_k*)/(λ_n−λ_k)|` of the
/// smallest-Im eigenvalue. Zero for a single soliton (empty product).
pub fn tail_shift(spectrum: &DiscreteSpectrum) -> f64 {
    let sorted = spectrum.sorted_descending_im();
    if sorted.len() < 2 {
        return 0.0;
    }
    let sigma_n = sorted[sorted.len() - 1].lambda.im;
    cross_product(&sorted).norm().ln() / (2.0 * sigma_n)
}

/// Tail envelope of the multi-soliton on one side.
pub fn tail_asymptote(spectrum: &DiscreteSpectrum, side: TailSide) -> TailAsymptote {
    let entry = spectrum
        .min_im_entry()
        .expect("tail asymptote needs a nonempty spectrum");
    let sigma = entry.lambda.im;
    let ts = tail_shift(spectrum);
    let (amplitude, t_shift) = match side {
        TailSide::Right => (4.0 * sigma * entry.b.norm(), ts),
        TailSide::Left => (4.0 * sigma / entry.b.norm(), -ts),
    };
    TailAsymptote {
        side,
        amplitude,
        rate: 2.0 * sigma,
        t_shift,
    }
}

/// Effective pulse duration at truncation parameter `epsilon`:
/// `T ≈ 2t_s + (1/2σ_n)·ln(4/ε)`, independent of the spectral phases.
pub fn duration_estimate(spectrum: &DiscreteSpectrum, epsilon: f64) -> f64 {
    let entry = spectrum
        .min_im_entry()
        .expect("duration estimate needs a nonempty spectrum");
    let sigma = entry.lambda.im;
    2.0 * tail_shift(spectrum) + (4.0 / epsilon).ln() / (2.0 * sigma)
}

/// Predicted effective-support window `[T₋, T₊]` at `epsilon`: the duration
/// estimate centered on `ln|b_n|/(2σ_n)` (the tails carry `|b_n|^{±1}`).
pub fn support_estimate(spectrum: &DiscreteSpectrum, epsilon: f64) -> (f64, f64) {
    let entry = spectrum
        .min_im_entry()
        .expect("support estimate needs a nonempty spectrum");
    let sigma = entry.lambda.im;
    let center = entry.b.norm().ln() / (2.0 * sigma);
    let half = 0.5 * duration_estimate(spectrum, epsilon);
    (center - half, center + half)
}

/// Complexity-reduction factor `α_N = ΣT^(n) / (N·T^(N))` of successive
/// removal, from the per-iteration durations `T^(1)..T^(N)` (index `n` is
/// the number of eigenvalues still present, so the last entry is the
/// initial full duration).
pub fn complexity_factor(durations: &[f64]) -> Result<f64> {
    if durations.is_empty() || durations.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidInput(
            "complexity factor needs positive durations".into(),
        ));
    }
    let n = durations.len() as f64;
    let full = durations[durations.len() - 1];
    Ok(durations.iter().sum::<f64>() / (n * full))
}

/// Geometry of the three-part split produced by removing the smallest-Im
/// eigenvalue with an estimation error `δ`: two first-order solitons escape
/// to `±t_δ^±` while the remaining multi-soliton stays in the middle,
/// separated near `t_th^±`.
#[derive(Clone, Copy, Debug)]
pub struct SeparationPrediction {
    pub t_delta_plus: f64,
    pub t_delta_minus: f64,
    /// Carrier phases of the escaping solitons (radians).
    pub phi_delta_plus: f64,
    pub phi_delta_minus: f64,
    /// Separation points between the escaping solitons and the middle part.
    pub t_th_plus: f64,
    pub t_th_minus: f64,
    /// Tail shift of the residual (n−1)-soliton.
    pub t0: f64,
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
}

/// Mismatch factors `α^± = b̂^{±1} − b^{±1}` between the true and the
/// enforced amplitude at the perturbed eigenvalue.
fn alpha_factors(b_true: Complex64, b_added: Complex64) -> (Complex64, Complex64) {
    (b_added - b_true, 1.0 / b_added - 1.0 / b_true)
}

/// Predict the split of `q̃` after adding `(λ_n + δ, b_added)` to a pulse
/// whose true smallest-Im pair is `(λ_n, b_true)` from `spectrum`.
///
/// Requires `|δ| ≪ σ_n` and `b_added ≠ b_true` (otherwise no solitons
/// separate and the prediction degenerates).
pub fn separation_predict(
    spectrum: &DiscreteSpectrum,
    delta: Complex64,
    b_added: Complex64,
) -> Result<SeparationPrediction> {
    let sorted = spectrum.sorted_descending_im();
    if sorted.len() < 2 {
        return Err(Error::InvalidInput(
            "separation analysis needs at least two eigenvalues".into(),
        ));
    }
    if delta.norm() == 0.0 {
        return Err(Error::InvalidInput("delta must be nonzero".into()));
    }
    let n = sorted.len();
    let lam_n = sorted[n - 1].lambda;
    let b_true = sorted[n - 1].b;
    let sigma_n = lam_n.im;
    let (alpha_plus, alpha_minus) = alpha_factors(b_true, b_added);
    let degenerate = alpha_plus.norm().min(alpha_minus.norm())
        < 1e-12 * b_true.norm().max(1.0 / b_true.norm());
    if degenerate {
        return Err(Error::InvalidInput(
            "alpha-degenerate: added amplitude equals the true amplitude".into(),
        ));
    }

    let prod = cross_product(&sorted);
    let core = Complex64::i() * 2.0 * sigma_n / delta * prod;
    let zp = core * alpha_plus;
    let zm = core * alpha_minus;
    let t_delta_plus = zp.norm().ln() / (2.0 * sigma_n);
    let t_delta_minus = zm.norm().ln() / (2.0 * sigma_n);
    let phi_delta_plus = zp.arg();
    let phi_delta_minus = zm.arg();

    // residual spectrum: drop the smallest-Im pair
    let rest = DiscreteSpectrum::new(
        sorted[..n - 1].iter().map(|e| (e.lambda, e.b)).collect(),
    )?;
    let t0 = tail_shift(&rest);
    let sigma_m = sorted[n - 2].lambda.im;
    let b_m = sorted[n - 2].b.norm();
    let t_th = |sign: f64, t_delta: f64, b_pow: f64| -> f64 {
        sign * (0.5 * (b_pow * sigma_m / sigma_n).ln() + sigma_n * t_delta + sigma_m * t0)
            / (sigma_n + sigma_m)
    };

    Ok(SeparationPrediction {
        t_delta_plus,
        t_delta_minus,
        phi_delta_plus,
        phi_delta_minus,
        t_th_plus: t_th(1.0, t_delta_plus, b_m),
        t_th_minus: t_th(-1.0, t_delta_minus, 1.0 / b_m),
        t0,
        alpha_plus,
        alpha_minus,
    })
}

/// Admissible eigenvalue-estimation error: the bound on `|δ/σ_n|` under
/// which the post-removal truncation window still excludes both escaping
/// solitons (the larger of the two ± branch values).
pub fn delta_bound(
    spectrum: &DiscreteSpectrum,
    epsilon: f64,
    b_added: Complex64,
) -> Result<f64> {
    let sorted = spectrum.sorted_descending_im();
    if sorted.len() < 2 {
        return Err(Error::InvalidInput(
            "delta bound needs at least two eigenvalues".into(),
        ));
    }
    let n = sorted.len();
    let lam_n = sorted[n - 1].lambda;
    let b_true = sorted[n - 1].b;
    let sigma_n = lam_n.im;
    let sigma_m = sorted[n - 2].lambda.im;
    let b_m = sorted[n - 2].b.norm();
    let (alpha_plus, alpha_minus) = alpha_factors(b_true, b_added);

    let rest = DiscreteSpectrum::new(
        sorted[..n - 1].iter().map(|e| (e.lambda, e.b)).collect(),
    )?;
    let ts = tail_shift(spectrum);
    let t0 = tail_shift(&rest);
    let root_eps = epsilon.sqrt();
    let shared = root_eps * sigma_m / sigma_n * (2.0 * sigma_n * (ts - t0)).exp();
    let branch = |alpha: Complex64, b_pow: f64| -> f64 {
        alpha.norm() * shared * (root_eps / (2.0 * b_pow)).powf(sigma_n / sigma_m)
    };
    Ok(branch(alpha_plus, b_m).max(branch(alpha_minus, 1.0 / b_m)))
}

/// Local maxima of the envelope `|q|` above `floor`, with parabolic
/// sub-sample refinement. Returned as `(time, amplitude)` pairs in time
/// order.
pub fn envelope_peaks(pulse: &SampledPulse, floor: f64) -> Vec<(f64, f64)> {
    let q = pulse.samples();
    let mut peaks = Vec::new();
    for m in 1..q.len() - 1 {
        let (a, b, c) = (q[m - 1].norm(), q[m].norm(), q[m + 1].norm());
        if b > floor && b >= a && b > c {
            let denom = a - 2.0 * b + c;
            let offset = if denom.abs() > 1e-300 {
                (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            let amp = b - 0.25 * (a - c) * offset;
            peaks.push((pulse.time(m) + offset * pulse.step(), amp));
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_b_spectrum(sigmas: &[f64]) -> DiscreteSpectrum {
        DiscreteSpectrum::new(sigmas.iter().map(|&s| (c(0.0, s), c(1.0, 0.0))).collect()).unwrap()
    }

    fn family_c() -> DiscreteSpectrum {
        unit_b_spectrum(&[2.5, 2.0, 1.5, 1.0, 0.5])
    }

    #[test]
    fn single_soliton_has_zero_shift() {
        let s = unit_b_spectrum(&[0.5]);
        assert_eq!(tail_shift(&s), 0.0);
    }

    #[test]
    fn family_c_tail_shift() {
        // λ_n = 0.5j against {1, 1.5, 2, 2.5}j: Π = 3·2·(5/3)·(3/2)·... = 15
        let ts = tail_shift(&family_c());
        assert!((ts - 15.0_f64.ln()).abs() < 1e-12, "t_s = {ts}");
    }

    #[test]
    fn tail_rates_match_both_sides() {
        let s = family_c();
        let left = tail_asymptote(&s, TailSide::Left);
        let right = tail_asymptote(&s, TailSide::Right);
        assert_eq!(left.rate, right.rate);
        assert!((left.rate - 1.0).abs() < 1e-15);
        assert_eq!(left.t_shift, -right.t_shift);
    }

    #[test]
    fn single_soliton_duration() {
        let s = unit_b_spectrum(&[0.5]);
        let t = duration_estimate(&s, 2e-4);
        assert!((t - 20000.0_f64.ln()).abs() < 1e-12, "T = {t}");
        assert!((t - 9.903).abs() < 1e-3);
    }

    #[test]
    fn duration_ignores_phases() {
        let with_phases = DiscreteSpectrum::new(vec![
            (c(0.0, 2.5), (Complex64::i() * 0.24).exp()),
            (c(0.0, 0.5), (Complex64::i() * 4.9).exp()),
        ])
        .unwrap();
        let unit = unit_b_spectrum(&[2.5, 0.5]);
        let a = duration_estimate(&with_phases, 2e-4);
        let b = duration_estimate(&unit, 2e-4);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn support_center_follows_b_magnitude() {
        let s = DiscreteSpectrum::new(vec![(c(0.0, 0.5), c(2.0, 0.0))]).unwrap();
        let (lo, hi) = support_estimate(&s, 2e-4);
        let center = 2.0_f64.ln() / 1.0;
        assert!((0.5 * (lo + hi) - center).abs() < 1e-12);
    }

    #[test]
    fn equal_durations_give_unit_factor() {
        assert!((complexity_factor(&[3.0, 3.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn predicted_staircases_match_reference_factors() {
        // duration-formula staircases for the three reference families
        let families: [(&[f64], f64); 3] = [
            (&[9.0, 7.0, 5.0, 3.0, 0.5], 0.3),
            (&[0.58, 0.56, 0.54, 0.52, 0.5], 0.62),
            (&[2.5, 2.0, 1.5, 1.0, 0.5], 0.46),
        ];
        for (sigmas, expect) in families {
            let mut remaining: Vec<f64> = sigmas.to_vec();
            let mut durations = Vec::new();
            while !remaining.is_empty() {
                let s = unit_b_spectrum(&remaining);
                durations.push(duration_estimate(&s, 2e-4));
                // remove the smallest-Im eigenvalue
                let min = remaining
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                remaining.retain(|&v| v != min);
            }
            durations.reverse(); // index n = remaining count
            let alpha = complexity_factor(&durations).unwrap();
            assert!(
                (alpha - expect).abs() < 0.05,
                "sigmas {sigmas:?}: alpha = {alpha}"
            );
        }
    }

    #[test]
    fn duration_decreases_while_removing() {
        for sigmas in [
            vec![9.0, 7.0, 5.0, 3.0, 0.5],
            vec![0.58, 0.56, 0.54, 0.52, 0.5],
            vec![2.5, 2.0, 1.5, 1.0, 0.5],
        ] {
            let mut remaining = sigmas;
            let mut last = f64::INFINITY;
            while !remaining.is_empty() {
                let t = duration_estimate(&unit_b_spectrum(&remaining), 2e-4);
                assert!(t < last, "duration grew: {t} after {last}");
                last = t;
                let min = remaining.iter().cloned().fold(f64::INFINITY, f64::min);
                remaining.retain(|&v| v != min);
            }
        }
    }

    fn fig2_spectrum() -> DiscreteSpectrum {
        let phases = [0.24, 4.90, 0.58, 3.98, 0.09];
        let sigmas = [2.5, 2.0, 1.5, 1.0, 0.5];
        DiscreteSpectrum::new(
            sigmas
                .iter()
                .zip(&phases)
                .map(|(&s, &p)| (c(0.0, s), (Complex64::i() * p).exp()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn halving_delta_grows_separation_by_ln2_over_sigma() {
        let s = fig2_spectrum();
        let b_added = (Complex64::i() * 5.88).exp();
        let p1 = separation_predict(&s, c(0.0, 1e-6), b_added).unwrap();
        let p2 = separation_predict(&s, c(0.0, 5e-7), b_added).unwrap();
        let grow = (p2.t_delta_plus + p2.t_delta_minus) - (p1.t_delta_plus + p1.t_delta_minus);
        let expect = 2.0_f64.ln() / 0.5;
        assert!((grow - expect).abs() < 1e-10, "grow = {grow}");
    }

    #[test]
    fn equal_amplitudes_are_degenerate() {
        let s = fig2_spectrum();
        let b_true = s.min_im_entry().unwrap().b;
        assert!(separation_predict(&s, c(0.0, 1e-8), b_true).is_err());
    }

    #[test]
    fn delta_bound_shrinks_superlinearly_in_epsilon() {
        let s = fig2_spectrum();
        let b_added = (Complex64::i() * 5.88).exp();
        let loose = delta_bound(&s, 2e-4, b_added).unwrap();
        let tight = delta_bound(&s, 2e-6, b_added).unwrap();
        assert!(loose > 0.0 && tight > 0.0);
        // bound ∝ ε^{(1/2)(1+σ_n/σ_{n−1})}: 100× tighter ε shrinks it > 10×
        assert!(loose / tight > 10.0, "ratio {}", loose / tight);
    }

    #[test]
    fn delta_bound_is_linear_in_alpha() {
        // unit-modulus b's make both branches share |α| = 2|sin(θ/2)| ≈ θ
        let s = unit_b_spectrum(&[2.5, 2.0, 1.5, 1.0, 0.5]);
        let b1 = (Complex64::i() * 1e-3).exp();
        let b2 = (Complex64::i() * 5e-4).exp();
        let r = delta_bound(&s, 2e-4, b1).unwrap() / delta_bound(&s, 2e-4, b2).unwrap();
        assert!((r - 2.0).abs() < 1e-5, "ratio = {r}");
    }

    #[test]
    fn peaks_of_two_bumps() {
        let grid = crate::pulse::TimeGrid::new(-10.0, 0.01, 2001).unwrap();
        let p = SampledPulse::from_fn(&grid, |t| {
            c(
                (-(t + 3.0) * (t + 3.0)).exp() + 0.5 * (-(t - 4.0) * (t - 4.0) / 0.5).exp(),
                0.0,
            )
        })
        .unwrap();
        let peaks = envelope_peaks(&p, 0.1);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].0 + 3.0).abs() < 1e-3);
        assert!((peaks[1].0 - 4.0).abs() < 1e-3);
    }
}
