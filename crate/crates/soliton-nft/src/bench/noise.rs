//! Bandwidth measurement and in-band-calibrated white noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::pulse::SampledPulse;
use crate::Complex64;

/// Width of the smallest frequency interval, centered on the spectral
/// centroid, that holds `energy_fraction` of the total spectral energy.
/// Frequencies are in cycles per unit time (so the sampled band is `1/h`).
pub fn measure_bandwidth(pulse: &SampledPulse, energy_fraction: f64) -> f64 {
    assert!(
        energy_fraction > 0.0 && energy_fraction < 1.0 + 1e-12,
        "energy fraction must lie in (0, 1], got {energy_fraction}"
    );
    let m = pulse.len();
    let mut buf: Vec<Complex64> = pulse.samples().to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let df = 1.0 / (m as f64 * pulse.step());
    let freq = |i: usize| -> f64 {
        if i <= m / 2 {
            i as f64 * df
        } else {
            (i as f64 - m as f64) * df
        }
    };
    let power: Vec<f64> = buf.iter().map(|v| v.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let centroid = power
        .iter()
        .enumerate()
        .map(|(i, p)| freq(i) * p)
        .sum::<f64>()
        / total;

    // accumulate symmetrically outward from the centroid
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        (freq(a) - centroid)
            .abs()
            .partial_cmp(&(freq(b) - centroid).abs())
            .expect("finite frequencies")
    });
    let mut acc = 0.0;
    let mut reach = 0.0f64;
    for i in order {
        acc += power[i];
        reach = reach.max((freq(i) - centroid).abs());
        if acc >= energy_fraction * total {
            break;
        }
    }
    2.0 * reach + df
}

/// Add circular complex white Gaussian noise calibrated so that the noise
/// power falling inside a band of width `b_max` relative to the signal
/// power equals `10^(−snr_db/10)`.
///
/// Per-sample variance: `σ² = (E/T)·(f_s/b_max)/SNR`. Deterministic for a
/// fixed `seed`.
pub fn add_awgn(pulse: &SampledPulse, snr_db: f64, b_max: f64, seed: u64) -> SampledPulse {
    assert!(b_max > 0.0, "b_max must be positive");
    let fs = 1.0 / pulse.step();
    assert!(
        fs >= b_max,
        "sampling rate {fs} cannot resolve the reference band {b_max}"
    );
    let snr = 10.0_f64.powf(snr_db / 10.0);
    let signal_power = pulse.energy() / (pulse.len() as f64 * pulse.step());
    let variance = signal_power * (fs / b_max) / snr;
    if variance == 0.0 {
        return pulse.clone();
    }
    let scale = (variance / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = pulse
        .samples()
        .iter()
        .map(|q| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            q + Complex64::new(scale * re, scale * im)
        })
        .collect();
    SampledPulse::new(pulse.t_start(), pulse.step(), samples)
        .expect("noise preserves pulse validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn soliton(sigma: f64, span: f64, len: usize) -> SampledPulse {
        let grid = TimeGrid::spanning(0.0, span, len).unwrap();
        SampledPulse::from_fn(&grid, |t| c(2.0 * sigma / (2.0 * sigma * t).cosh(), 0.0)).unwrap()
    }

    #[test]
    fn sech_bandwidth_matches_analytic_spectrum() {
        // q = 2σ sech(2σt) has |Q(f)|² ∝ sech²(π²f/2σ); the 99.99% band is
        // B = (4σ/π²)·atanh(0.9999)
        let sigma = 0.5;
        let pulse = soliton(sigma, 60.0, 4096);
        let expect = 4.0 * sigma / (std::f64::consts::PI.powi(2)) * 0.9999_f64.atanh();
        let got = measure_bandwidth(&pulse, 0.9999);
        assert!(
            (got - expect).abs() / expect < 0.02,
            "B = {got} vs {expect}"
        );
    }

    #[test]
    fn zero_padding_preserves_bandwidth() {
        let sigma = 0.8;
        let narrow = soliton(sigma, 40.0, 2048);
        let wide = soliton(sigma, 80.0, 4096); // same step, doubled span
        let a = measure_bandwidth(&narrow, 0.9999);
        let b = measure_bandwidth(&wide, 0.9999);
        let df = 1.0 / (2048.0 * narrow.step());
        assert!((a - b).abs() < 3.0 * df, "B = {a} vs {b}");
    }

    #[test]
    fn full_fraction_covers_sampled_band() {
        let pulse = soliton(0.5, 40.0, 1024);
        let fs = 1.0 / pulse.step();
        let b = measure_bandwidth(&pulse, 1.0);
        assert!((b - fs).abs() < 3.0 * fs / 1024.0, "B = {b} vs fs = {fs}");
    }

    #[test]
    fn infinite_snr_is_identity() {
        let pulse = soliton(0.5, 40.0, 512);
        let noisy = add_awgn(&pulse, f64::INFINITY, 2.0, 7);
        assert_eq!(noisy, pulse);
    }

    #[test]
    fn equal_seeds_are_bit_identical() {
        let pulse = soliton(0.5, 40.0, 512);
        let a = add_awgn(&pulse, 20.0, 2.0, 42);
        let b = add_awgn(&pulse, 20.0, 2.0, 42);
        assert_eq!(a, b);
        let c = add_awgn(&pulse, 20.0, 2.0, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn in_band_noise_power_matches_requested_snr() {
        let pulse = soliton(0.5, 40.0, 1024);
        let snr_db = 13.0;
        let b_max = 2.0;
        let signal_power = pulse.energy() / (pulse.len() as f64 * pulse.step());
        let fs = 1.0 / pulse.step();

        // measured mean |n|² over many trials, scaled by the in-band
        // fraction b_max/fs of the white spectrum
        let mut acc = 0.0;
        let trials = 1000;
        for seed in 0..trials {
            let noisy = add_awgn(&pulse, snr_db, b_max, seed);
            acc += noisy
                .samples()
                .iter()
                .zip(pulse.samples())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                / pulse.len() as f64;
        }
        let mean_noise_power = acc / trials as f64;
        let in_band = mean_noise_power * (b_max / fs);
        let ratio = in_band / signal_power;
        let expect = 10.0_f64.powf(-snr_db / 10.0);
        assert!(
            (ratio - expect).abs() / expect < 0.02,
            "ratio {ratio:.5} vs {expect:.5}"
        );
    }
}
