//! Discretized Zakharov–Shabat scattering.
//!
//! The ZSS for a pulse `q(t)` is the linear system
//!
//! ```text
//! ϑ' = [ −jλ    q  ] ϑ
//!      [ −q*   jλ  ]
//! ```
//!
//! In the rotated variables `Ψ = (ϑ₁ e^{jλt}, ϑ₂ e^{−jλt})` the boundary
//! condition at `t → −∞` becomes `Ψ → (1, 0)`, and one step of width `h`
//! over a frozen sample `q_m` is the unimodular transfer matrix of
//! [`transfer_matrix`]. Propagating left-to-right yields the spectral
//! coefficients `a, b`; propagating a second vector right-to-left and
//! combining the two at a split index gives the numerically stable
//! forward–backward estimates and the Jost eigenfunction used by the
//! Darboux update.

use crate::error::{Error, Result};
use crate::pulse::SampledPulse;
use crate::Complex64;

/// Relative floor on `|u₂|` below which the forward–backward `b` estimate
/// is considered degenerate.
pub const DIVISION_FLOOR: f64 = 1e-14;

/// Default relative tolerance for the branch mismatch of a stitched Jost
/// solution. Diagnostic, not a correctness gate.
pub const DEFAULT_STITCH_TOL: f64 = 1e-3;

/// 2×2 complex matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Mat2 {
    pub fn identity() -> Self {
        Self {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::new(0.0, 0.0),
            m21: Complex64::new(0.0, 0.0),
            m22: Complex64::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m11 * v[0] + self.m12 * v[1],
            self.m21 * v[0] + self.m22 * v[1],
        ]
    }
}

/// One-step scattering scheme: the transfer matrix of `Ψ` across a sample.
///
/// Only the mid-point scheme is implemented; higher-order schemes slot in
/// through [`scheme_by_name`].
pub trait OneStepScheme: Send + Sync {
    fn name(&self) -> &'static str;

    /// Transfer matrix across a step of width `h` centered on the sample
    /// `q` at time `t`. Negating `h` must produce the matrix inverse.
    fn matrix(&self, q: Complex64, t: f64, h: f64, lambda: Complex64) -> Mat2;

    /// `∂S/∂λ` for the same step.
    fn matrix_dlambda(&self, q: Complex64, t: f64, h: f64, lambda: Complex64) -> Mat2;

    /// Matrix and its λ-derivative in one evaluation.
    fn matrix_with_dlambda(&self, q: Complex64, t: f64, h: f64, lambda: Complex64) -> (Mat2, Mat2) {
        (self.matrix(q, t, h, lambda), self.matrix_dlambda(q, t, h, lambda))
    }
}

/// Exponential mid-point scheme: the exact propagator of the frozen-sample
/// system, second order in `h` globally.
pub struct Midpoint;

fn sinc(x: f64) -> f64 {
    // series guard: sin(x)/x → 1 − x²/6 for |x| below the rounding floor
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl OneStepScheme for Midpoint {
    fn name(&self) -> &'static str {
        "midpoint"
    }

    fn matrix(&self, q: Complex64, t: f64, h: f64, lambda: Complex64) -> Mat2 {
        let amp = q.norm();
        let x = amp * h;
        let cos: Complex64 = x.cos().into();
        // sin(|q|h)/|q| with the q → 0 limit handled by the sinc guard
        let k = h * sinc(x);
        let phase = Complex64::i() * 2.0 * lambda * t;
        let e_plus = phase.exp();
        let e_minus = (-phase).exp();
        Mat2 {
            m11: cos,
            m12: q * k * e_plus,
            m21: -q.conj() * k * e_minus,
            m22: cos,
        }
    }

    fn matrix_dlambda(&self, q: Complex64, t: f64, h: f64, lambda: Complex64) -> Mat2 {
        self.matrix_with_dlambda(q, t, h, lambda).1
    }

    fn matrix_with_dlambda(&self, q: Complex64, t: f64, h: f64, lambda: Complex64) -> (Mat2, Mat2) {
        let s = self.matrix(q, t, h, lambda);
        // λ enters only through exp(±2jλt)
        let jt = Complex64::i() * 2.0 * t;
        let zero = Complex64::new(0.0, 0.0);
        let ds = Mat2 {
            m11: zero,
            m12: jt * s.m12,
            m21: -jt * s.m21,
            m22: zero,
        };
        (s, ds)
    }
}

static MIDPOINT: Midpoint = Midpoint;

/// Look up a scattering scheme by name.
pub fn scheme_by_name(name: &str) -> Result<&'static dyn OneStepScheme> {
    match name {
        "midpoint" => Ok(&MIDPOINT),
        other => Err(Error::UnknownScheme(other.to_string())),
    }
}

/// Mid-point transfer matrix `S_m` for one sample.
pub fn transfer_matrix(q: Complex64, t: f64, h: f64, lambda: Complex64) -> Mat2 {
    MIDPOINT.matrix(q, t, h, lambda)
}

/// Forward trajectory `w^(0..M)` with `w^(0) = (1, 0)`,
/// `w^(m+1) = S_m w^(m)`.
pub fn propagate_forward(pulse: &SampledPulse, lambda: Complex64) -> Vec<[Complex64; 2]> {
    propagate_forward_with(&MIDPOINT, pulse, lambda)
}

fn propagate_forward_with(
    scheme: &dyn OneStepScheme,
    pulse: &SampledPulse,
    lambda: Complex64,
) -> Vec<[Complex64; 2]> {
    let h = pulse.step();
    let mut out = Vec::with_capacity(pulse.len() + 1);
    let mut w = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    out.push(w);
    for (m, &q) in pulse.samples().iter().enumerate() {
        w = scheme.matrix(q, pulse.time(m), h, lambda).apply(w);
        out.push(w);
    }
    out
}

/// Backward trajectory `u^(0..M)` with `u^(M) = (0, 1)`,
/// `u^(m) = S_m⁻¹ u^(m+1)`; the inverse is realized by negating `h`.
pub fn propagate_backward(pulse: &SampledPulse, lambda: Complex64) -> Vec<[Complex64; 2]> {
    propagate_backward_with(&MIDPOINT, pulse, lambda)
}

fn propagate_backward_with(
    scheme: &dyn OneStepScheme,
    pulse: &SampledPulse,
    lambda: Complex64,
) -> Vec<[Complex64; 2]> {
    let h = pulse.step();
    let m_count = pulse.len();
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; m_count + 1];
    let mut u = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    out[m_count] = u;
    for m in (0..m_count).rev() {
        u = scheme
            .matrix(pulse.samples()[m], pulse.time(m), -h, lambda)
            .apply(u);
        out[m] = u;
    }
    out
}

/// Spectral coefficients `(â(λ), b̂(λ)) = (w₁^(M), w₂^(M))` from a single
/// forward pass.
pub fn spectral_coefficients(pulse: &SampledPulse, lambda: Complex64) -> (Complex64, Complex64) {
    let h = pulse.step();
    let mut w = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    for (m, &q) in pulse.samples().iter().enumerate() {
        w = MIDPOINT.matrix(q, pulse.time(m), h, lambda).apply(w);
    }
    (w[0], w[1])
}

/// `â(λ)` together with `∂â/∂λ`, by jointly propagating the forward
/// recursion and its analytic λ-derivative.
pub fn a_with_derivative(pulse: &SampledPulse, lambda: Complex64) -> (Complex64, Complex64) {
    let h = pulse.step();
    let zero = Complex64::new(0.0, 0.0);
    let mut w = [Complex64::new(1.0, 0.0), zero];
    let mut dw = [zero, zero];
    for (m, &q) in pulse.samples().iter().enumerate() {
        let (s, ds) = MIDPOINT.matrix_with_dlambda(q, pulse.time(m), h, lambda);
        let dw_next = {
            let a = ds.apply(w);
            let b = s.apply(dw);
            [a[0] + b[0], a[1] + b[1]]
        };
        w = s.apply(w);
        dw = dw_next;
    }
    (w[0], dw[0])
}

/// `∂â/∂λ` at `λ`.
pub fn a_derivative(pulse: &SampledPulse, lambda: Complex64) -> Complex64 {
    a_with_derivative(pulse, lambda).1
}

/// Forward and backward trajectories for one `(pulse, λ)` pair, meeting at
/// the split index `p`.
#[derive(Clone, Debug)]
pub struct ScatteringRun {
    pub lambda: Complex64,
    /// `w^(m)`, `m = 0..=M`.
    pub forward: Vec<[Complex64; 2]>,
    /// `u^(m)`, `m = 0..=M`.
    pub backward: Vec<[Complex64; 2]>,
    pub split_index: usize,
}

/// Split index from a fraction of the sample count, clamped to `(0, M)`.
pub fn split_index(len: usize, fraction: f64) -> usize {
    (((len as f64) * fraction).round() as usize).clamp(1, len - 1)
}

pub fn scattering_run(pulse: &SampledPulse, lambda: Complex64, p: usize) -> Result<ScatteringRun> {
    if p == 0 || p >= pulse.len() {
        return Err(Error::InvalidInput(format!(
            "split index {p} outside (0, {})",
            pulse.len()
        )));
    }
    Ok(ScatteringRun {
        lambda,
        forward: propagate_forward(pulse, lambda),
        backward: propagate_backward(pulse, lambda),
        split_index: p,
    })
}

impl ScatteringRun {
    /// Forward–backward coefficients at the split index:
    /// `â = w₁u₂ − u₁w₂`, `b̂ = w₂/u₂`.
    pub fn fb_coefficients(&self) -> Result<(Complex64, Complex64)> {
        let p = self.split_index;
        let w = self.forward[p];
        let u = self.backward[p];
        let a_hat = w[0] * u[1] - u[0] * w[1];
        let scale = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        if u[1].norm() <= DIVISION_FLOOR * scale {
            return Err(Error::DegenerateDivision {
                split_index: p,
                magnitude: u[1].norm(),
            });
        }
        Ok((a_hat, w[1] / u[1]))
    }

    /// Stitch the two branches into the Jost eigenfunction `ϑ(λ; t_m)`:
    /// the forward branch below the split, `b̂`-scaled backward branch above.
    ///
    /// The trajectory vectors live on step edges `t_m − h/2`; each value is
    /// advanced half a step so the eigenfunction is second-order accurate
    /// at the sample times. A zero `b_hat` leaves the backward branch empty
    /// and skips the mismatch check (nothing to stitch against).
    pub fn jost_solution(
        &self,
        pulse: &SampledPulse,
        b_hat: Complex64,
        stitch_tol: f64,
    ) -> Result<JostSolution> {
        let p = self.split_index;
        // mismatch of the two Ψ-branches where they meet
        let wl = self.forward[p];
        let ur = self.backward[p];
        let right = [b_hat * ur[0], b_hat * ur[1]];
        let diff = ((wl[0] - right[0]).norm_sqr() + (wl[1] - right[1]).norm_sqr()).sqrt();
        let scale = (wl[0].norm_sqr() + wl[1].norm_sqr())
            .sqrt()
            .max((right[0].norm_sqr() + right[1].norm_sqr()).sqrt());
        let relative = if scale > 0.0 { diff / scale } else { 0.0 };
        if b_hat.norm() > 0.0 && relative > stitch_tol {
            return Err(Error::StitchMismatch {
                relative,
                tolerance: stitch_tol,
            });
        }

        let lambda = self.lambda;
        let h = pulse.step();
        let values = (0..pulse.len())
            .map(|m| {
                let t = pulse.time(m);
                let q = pulse.samples()[m];
                let v = if m <= p {
                    self.forward[m]
                } else {
                    let u = self.backward[m];
                    [b_hat * u[0], b_hat * u[1]]
                };
                // edge t_m − h/2 → sample center t_m
                let v = MIDPOINT.matrix(q, t, 0.5 * h, lambda).apply(v);
                let phase = Complex64::i() * lambda * t;
                [v[0] * (-phase).exp(), v[1] * phase.exp()]
            })
            .collect();
        Ok(JostSolution {
            lambda,
            values,
            split_index: p,
            stitch_error: relative,
        })
    }
}

/// Forward–backward spectral coefficients `(â, b̂)` at split index `p`.
pub fn fb_coefficients(
    pulse: &SampledPulse,
    lambda: Complex64,
    p: usize,
) -> Result<(Complex64, Complex64)> {
    scattering_run(pulse, lambda, p)?.fb_coefficients()
}

/// Stitched approximation of the Jost solution `ϑ(λ; t)` on the pulse grid.
#[derive(Clone, Debug)]
pub struct JostSolution {
    pub lambda: Complex64,
    /// `ϑ(λ; t_m)` for `m = 0..M−1`.
    pub values: Vec<[Complex64; 2]>,
    pub split_index: usize,
    /// Relative branch mismatch recorded at the split index.
    pub stitch_error: f64,
}

/// Jost solution at `λ` with amplitude `b_hat`, stitched at `p` with the
/// default tolerance.
pub fn jost_solution(
    pulse: &SampledPulse,
    lambda: Complex64,
    p: usize,
    b_hat: Complex64,
) -> Result<JostSolution> {
    scattering_run(pulse, lambda, p)?.jost_solution(pulse, b_hat, DEFAULT_STITCH_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_sample_gives_identity() {
        let s = transfer_matrix(c(0.0, 0.0), 1.3, 0.05, c(0.7, 0.4));
        let i = Mat2::identity();
        assert!((s.m11 - i.m11).norm() < 1e-15);
        assert!((s.m12 - i.m12).norm() < 1e-15);
        assert!((s.m21 - i.m21).norm() < 1e-15);
        assert!((s.m22 - i.m22).norm() < 1e-15);
    }

    #[test]
    fn determinant_is_one() {
        let s = transfer_matrix(c(1.4, -2.3), 0.7, 0.02, c(0.3, 1.1));
        assert!((s.det() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn tiny_amplitude_matches_series_branch() {
        // straddle the sinc guard: both sides of |q|h = 1e-8 must agree
        let lam = c(0.2, 0.9);
        let below = transfer_matrix(c(9.0e-7, 0.0), 0.4, 0.01, lam);
        let above = transfer_matrix(c(1.1e-6, 0.0), 0.4, 0.01, lam);
        assert!((below.m12 / 9.0e-7 - above.m12 / 1.1e-6).norm() < 1e-12);
    }

    /// Adaptive-free RK4 oracle: integrate Ψ' = B(t)Ψ with
    /// B = [[0, q e^{2jλt}], [−q* e^{−2jλt}, 0]] across [t−h/2, t+h/2].
    fn ode_step_matrix(q: Complex64, t: f64, h: f64, lambda: Complex64, steps: usize) -> Mat2 {
        let rhs = |time: f64, v: [Complex64; 2]| -> [Complex64; 2] {
            let phase = Complex64::i() * 2.0 * lambda * time;
            [q * phase.exp() * v[1], -q.conj() * (-phase).exp() * v[0]]
        };
        let advance = |mut v: [Complex64; 2]| {
            let dt = h / steps as f64;
            let mut time = t - h / 2.0;
            for _ in 0..steps {
                let k1 = rhs(time, v);
                let v2 = [v[0] + 0.5 * dt * k1[0], v[1] + 0.5 * dt * k1[1]];
                let k2 = rhs(time + 0.5 * dt, v2);
                let v3 = [v[0] + 0.5 * dt * k2[0], v[1] + 0.5 * dt * k2[1]];
                let k3 = rhs(time + 0.5 * dt, v3);
                let v4 = [v[0] + dt * k3[0], v[1] + dt * k3[1]];
                let k4 = rhs(time + dt, v4);
                v = [
                    v[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    v[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                ];
                time += dt;
            }
            v
        };
        let col1 = advance([c(1.0, 0.0), c(0.0, 0.0)]);
        let col2 = advance([c(0.0, 0.0), c(1.0, 0.0)]);
        Mat2 {
            m11: col1[0],
            m12: col2[0],
            m21: col1[1],
            m22: col2[1],
        }
    }

    #[test]
    fn one_step_matches_ode_integration() {
        // q = 1, t = 0, h = 0.01, λ = j: frozen-phase error is O(h²)
        let (q, t, h, lam) = (c(1.0, 0.0), 0.0, 0.01, c(0.0, 1.0));
        let s = transfer_matrix(q, t, h, lam);
        let o = ode_step_matrix(q, t, h, lam, 64);
        let err = [
            (s.m11 - o.m11).norm(),
            (s.m12 - o.m12).norm(),
            (s.m21 - o.m21).norm(),
            (s.m22 - o.m22).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        assert!(err < 1e-4 * h, "entrywise error {err:.3e}");
    }

    #[test]
    fn negated_step_is_inverse() {
        let (q, t, h, lam) = (c(0.8, -1.1), -0.6, 0.03, c(0.4, 0.7));
        let s = transfer_matrix(q, t, h, lam);
        let inv = transfer_matrix(q, t, -h, lam);
        let p = s.mul(&inv);
        assert!((p.m11 - c(1.0, 0.0)).norm() < 1e-13);
        assert!((p.m12).norm() < 1e-13);
        assert!((p.m21).norm() < 1e-13);
        assert!((p.m22 - c(1.0, 0.0)).norm() < 1e-13);
    }

    fn zero_pulse() -> SampledPulse {
        SampledPulse::zeros(&TimeGrid::new(-4.0, 0.25, 33).unwrap())
    }

    #[test]
    fn vacuum_forward_stays_at_boundary_vector() {
        let w = propagate_forward(&zero_pulse(), c(0.3, 0.8));
        for v in &w {
            assert_eq!(*v, [c(1.0, 0.0), c(0.0, 0.0)]);
        }
    }

    #[test]
    fn vacuum_backward_stays_at_boundary_vector() {
        let u = propagate_backward(&zero_pulse(), c(-0.2, 1.5));
        for v in &u {
            assert_eq!(*v, [c(0.0, 0.0), c(1.0, 0.0)]);
        }
    }

    #[test]
    fn backward_undoes_forward() {
        let grid = TimeGrid::new(-3.0, 0.05, 121).unwrap();
        let pulse = SampledPulse::from_fn(&grid, |t| {
            c((-t * t).exp() * 1.3, 0.4 * (-t * t / 2.0).exp())
        })
        .unwrap();
        let lam = c(0.3, 0.6);
        let w = propagate_forward(&pulse, lam);
        let u = propagate_backward(&pulse, lam);
        // u^(0) = S₀⁻¹…S_{M−1}⁻¹ (0,1); applying the forward product to it
        // must return (0,1): check via the constant Wronskian instead,
        // det[w^(m), u^(m)] is m-independent for a unimodular scheme.
        let det0 = w[0][0] * u[0][1] - u[0][0] * w[0][1];
        let mid = pulse.len() / 2;
        let detm = w[mid][0] * u[mid][1] - u[mid][0] * w[mid][1];
        let dete = w[pulse.len()][0] * u[pulse.len()][1] - u[pulse.len()][0] * w[pulse.len()][1];
        assert!((det0 - detm).norm() < 1e-12);
        assert!((detm - dete).norm() < 1e-12);
    }

    #[test]
    fn vacuum_spectral_coefficients() {
        let (a, b) = spectral_coefficients(&zero_pulse(), c(0.1, 0.9));
        assert_eq!(a, c(1.0, 0.0));
        assert_eq!(b, c(0.0, 0.0));
    }

    #[test]
    fn vacuum_fb_coefficients() {
        let p = zero_pulse();
        let (a, b) = fb_coefficients(&p, c(0.4, 1.2), p.len() / 2).unwrap();
        assert_eq!(a, c(1.0, 0.0));
        assert_eq!(b, c(0.0, 0.0));
    }

    #[test]
    fn vacuum_a_derivative_is_zero() {
        assert_eq!(a_derivative(&zero_pulse(), c(0.2, 0.7)), c(0.0, 0.0));
    }

    #[test]
    fn vacuum_jost_solution_is_plane_wave() {
        let pulse = zero_pulse();
        let lam = c(0.0, 1.0);
        let p = pulse.len() / 2;
        let theta = jost_solution(&pulse, lam, p, c(0.0, 0.0)).unwrap();
        assert_eq!(theta.stitch_error, 0.0);
        for m in 0..p {
            let t = pulse.time(m);
            let expect = (-Complex64::i() * lam * t).exp();
            assert!((theta.values[m][0] - expect).norm() < 1e-12);
            assert!(theta.values[m][1].norm() < 1e-12);
        }
    }

    #[test]
    fn split_index_clamps() {
        assert_eq!(split_index(100, 0.5), 50);
        assert_eq!(split_index(100, 0.0), 1);
        assert_eq!(split_index(100, 1.0), 99);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let grid = TimeGrid::new(-5.0, 0.02, 501).unwrap();
        let pulse = SampledPulse::from_fn(&grid, |t| {
            c(1.7 * (-t * t).exp(), -0.6 * (-(t - 0.4) * (t - 0.4)).exp())
        })
        .unwrap();
        let lam = c(0.15, 0.8);
        let (_, da) = a_with_derivative(&pulse, lam);
        let eps = 1e-6 * (1.0 + lam.norm());
        let (ap, _) = spectral_coefficients(&pulse, lam + c(eps, 0.0));
        let (am, _) = spectral_coefficients(&pulse, lam - c(eps, 0.0));
        let fd = (ap - am) / (2.0 * eps);
        assert!(
            (da - fd).norm() / fd.norm() < 1e-5,
            "analytic {da} vs fd {fd}"
        );
    }
}
