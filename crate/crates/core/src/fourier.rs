//! Discrete Fourier helpers on the uniform periodic grid `θ_j = j/N`.
//!
//! Coefficients follow the convention `f_k = ∫ f(θ) e^{-2πikθ} dθ`, which the
//! DFT approximates as `(1/N) Σ_j f(θ_j) e^{-2πijk/N}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Full normalized DFT: entry `k` approximates `f_k` (indices mod N).
pub fn analyze(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    if n == 0 {
        return buf;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Coefficients `f_0..f_kmax` of a real grid function. `kmax` is clamped to `N/2`.
pub fn coefficients(values: &[f64], kmax: usize) -> Vec<Complex64> {
    let full = analyze(values);
    let top = kmax.min(values.len() / 2);
    full[..=top].to_vec()
}

/// Synthesize `f(θ_j) = f_0 + 2 Σ_k Re(f_k e^{2πikθ_j})` on `n` points.
///
/// Modes beyond the Nyquist index alias onto the grid the same way the
/// continuous function would be sampled.
pub fn synthesize(mean: f64, modes: &[Complex64], n: usize) -> Vec<f64> {
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Vec::new();
    }
    spec[0] += mean;
    for (i, &c) in modes.iter().enumerate() {
        let k = (i + 1) % n;
        spec[k] += c;
        spec[(n - k) % n] += c.conj();
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    spec.into_iter().map(|c| c.re).collect()
}

/// Spectral derivative of order `order` of a real grid function.
pub fn derivative(values: &[f64], order: u32) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut spec = analyze(values);
    for (k, c) in spec.iter_mut().enumerate() {
        let wave = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        // the Nyquist mode has no well-defined odd derivative
        if n % 2 == 0 && k == n / 2 && order % 2 == 1 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        *c *= Complex64::new(0.0, 2.0 * PI * wave).powu(order);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    spec.into_iter().map(|c| c.re).collect()
}

/// Evaluate the band-limited interpolant of a grid function at arbitrary `theta`.
pub fn interpolate(values: &[f64], theta: f64) -> f64 {
    let n = values.len();
    let spec = analyze(values);
    eval_spectrum(&spec, n, theta, 0)
}

/// Evaluate the `order`-th derivative of the trigonometric interpolant with
/// full DFT `spec` (length `n`) at `theta`.
pub fn eval_spectrum(spec: &[Complex64], n: usize, theta: f64, order: u32) -> f64 {
    let mut acc = if order == 0 { spec[0].re } else { 0.0 };
    let half = n / 2;
    for k in 1..=half {
        // the Nyquist term is shared with its mirror: X cos(wθ)
        let weight = if n % 2 == 0 && k == half { 1.0 } else { 2.0 };
        let w = 2.0 * PI * k as f64;
        let c = spec[k] * Complex64::new(0.0, w).powu(order);
        acc += weight * (c * Complex64::from_polar(1.0, w * theta)).re;
    }
    acc
}

/// Evaluate a one-sided series `mean + 2 Σ Re(f_k e^{2πikθ})`.
pub fn eval_series(mean: f64, modes: &[Complex64], theta: f64) -> f64 {
    let mut acc = mean;
    for (i, &c) in modes.iter().enumerate() {
        let w = 2.0 * PI * (i + 1) as f64;
        acc += 2.0 * (c * Complex64::from_polar(1.0, w * theta)).re;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesize_analyze_round_trip() {
        let modes = vec![Complex64::new(0.25, -0.1), Complex64::new(0.0, 0.05)];
        let grid = synthesize(1.0, &modes, 16);
        let back = coefficients(&grid, 2);
        assert!((back[0].re - 1.0).abs() < 1e-15);
        for (a, b) in back[1..].iter().zip(&modes) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_cosine() {
        let n = 32;
        let vals: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * j as f64 / n as f64).cos())
            .collect();
        let d = derivative(&vals, 1);
        for (j, v) in d.iter().enumerate() {
            let t = j as f64 / n as f64;
            assert!((v + 2.0 * PI * (2.0 * PI * t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_exact_for_band_limited() {
        let modes = vec![Complex64::new(0.3, 0.1), Complex64::new(-0.1, 0.2)];
        let grid = synthesize(1.0, &modes, 17);
        let t = 0.1234;
        assert!((interpolate(&grid, t) - eval_series(1.0, &modes, t)).abs() < 1e-13);
    }
}
