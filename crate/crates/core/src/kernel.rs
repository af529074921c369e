//! Odd interaction rates on the unit circle.
//!
//! An [`InteractionKernel`] is a finite sine series
//! `V(θ) = Σ_{l=1..L} a_l sin(2πlθ)`. Oddness, `V(0) = V(1/2) = 0` and
//! 1-periodicity hold by construction, and every derived quantity (derivative,
//! primitive, half-period sine coefficients, rolled-up kernels) has a closed
//! form in the coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Panels used by [`InteractionKernel::project`] (composite Simpson).
pub const PROJECTION_PANELS: usize = 4096;

/// Grid points scanned before golden-section refinement in extremum searches.
const SCAN_POINTS: usize = 10_000;

/// Finite sine series `V(θ) = Σ a_l sin(2πlθ)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InteractionKernel {
    /// `coeffs[l - 1] = a_l`.
    coeffs: Vec<f64>,
}

impl InteractionKernel {
    /// Build from dense coefficients `a_1..a_L`. Trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// The zero kernel.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Build from `(mode, coefficient)` pairs; repeated modes are summed.
    pub fn from_modes(pairs: &[(usize, f64)]) -> Result<Self> {
        let top = pairs.iter().map(|&(l, _)| l).max().unwrap_or(0);
        let mut coeffs = vec![0.0; top];
        for &(l, a) in pairs {
            if l == 0 {
                return Err(Error::InvalidArgument(
                    "kernel modes start at 1 (mode 0 would make V non-odd)".into(),
                ));
            }
            if !a.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "kernel coefficient for mode {l} is not finite"
                )));
            }
            coeffs[l - 1] += a;
        }
        Ok(Self::new(coeffs))
    }

    /// Project an arbitrary odd 1-periodic function onto `modes` sine modes.
    ///
    /// `a_l = 2 ∫_0^1 V(θ) sin(2πlθ) dθ`, evaluated with composite Simpson on
    /// [`PROJECTION_PANELS`] panels.
    pub fn project<F: Fn(f64) -> f64>(v: F, modes: usize) -> Self {
        let n = PROJECTION_PANELS;
        let h = 1.0 / n as f64;
        let samples: Vec<f64> = (0..=n).map(|j| v(j as f64 * h)).collect();
        let coeffs = (1..=modes)
            .map(|l| {
                let w = TWO_PI * l as f64;
                let integrand = |j: usize| samples[j] * (w * j as f64 * h).sin();
                2.0 * simpson(integrand, n, h)
            })
            .collect();
        Self::new(coeffs)
    }

    /// Odd piecewise-linear ramp: `V(θ) = θ` on `[0, knee]`, linear back to
    /// zero at `1/2`, projected onto `modes` sine modes.
    pub fn odd_ramp(knee: f64, modes: usize) -> Result<Self> {
        if !(knee > 0.0 && knee < 0.5) {
            return Err(Error::InvalidArgument(format!("ramp knee must lie in ]0, 1/2[, got {knee}")));
        }
        let ramp = move |t: f64| {
            let s = t.rem_euclid(1.0);
            let (x, sign) = if s <= 0.5 { (s, 1.0) } else { (1.0 - s, -1.0) };
            let y = if x <= knee { x } else { knee * (0.5 - x) / (0.5 - knee) };
            sign * y
        };
        Ok(Self::project(ramp, modes))
    }

    /// `sign(α) sin(2πθ + α sin 2πθ)` projected onto `modes` sine modes.
    pub fn phase_modulated(alpha: f64, modes: usize) -> Self {
        let s = alpha.signum();
        Self::project(move |t| s * (TWO_PI * t + alpha * (TWO_PI * t).sin()).sin(), modes)
    }

    /// Dense coefficients `a_1..a_L`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest mode `L` with a nonzero coefficient (0 for the zero kernel).
    pub fn max_mode(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `a_l` (zero beyond `L`).
    pub fn coeff(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.coeffs.get(l - 1).copied().unwrap_or(0.0)
        }
    }

    /// Nonzero `(mode, a_l)` pairs.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, &a)| (i + 1, a))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `V(θ)`.
    pub fn eval(&self, theta: f64) -> f64 {
        self.modes()
            .map(|(l, a)| a * (TWO_PI * l as f64 * theta).sin())
            .sum()
    }

    /// `V'(θ) = Σ a_l 2πl cos(2πlθ)`.
    pub fn eval_prime(&self, theta: f64) -> f64 {
        self.modes()
            .map(|(l, a)| {
                let w = TWO_PI * l as f64;
                a * w * (w * theta).cos()
            })
            .sum()
    }

    /// `V''(θ)`.
    pub fn eval_second(&self, theta: f64) -> f64 {
        self.modes()
            .map(|(l, a)| {
                let w = TWO_PI * l as f64;
                -a * w * w * (w * theta).sin()
            })
            .sum()
    }

    /// Primitive `Φ(θ) = ∫_0^θ V = Σ a_l (1 − cos 2πlθ)/(2πl)`; even and 1-periodic.
    pub fn primitive(&self, theta: f64) -> f64 {
        self.modes()
            .map(|(l, a)| {
                let w = TWO_PI * l as f64;
                a * (1.0 - (w * theta).cos()) / w
            })
            .sum()
    }

    /// Mean of the primitive over the circle, `Σ a_l/(2πl)`.
    pub fn primitive_mean(&self) -> f64 {
        self.modes().map(|(l, a)| a / (TWO_PI * l as f64)).sum()
    }

    /// `v_k = ∫_0^{1/2} V(θ) sin(2πkθ) dθ = a_k / 4`.
    ///
    /// Negative `k` follow `v_{-k} = -v_k`.
    pub fn sine_coefficient(&self, k: i64) -> f64 {
        let v = self.coeff(k.unsigned_abs() as usize) / 4.0;
        if k < 0 {
            -v
        } else {
            v
        }
    }

    /// Rolled-up kernel `V_n(θ) = Σ_{j<n} V(θ − j/n)`: keeps modes divisible by
    /// `n`, multiplied by `n`.
    pub fn rolled_up(&self, n: usize) -> Result<Self> {
        check_period(n)?;
        let coeffs = (1..=self.max_mode())
            .map(|l| if l % n == 0 { n as f64 * self.coeff(l) } else { 0.0 })
            .collect();
        Ok(Self::new(coeffs))
    }

    /// Unrolled kernel `Ṽ_n(θ) = Σ_{j<n} V((θ − j)/n)` with coefficients
    /// `c_m = n a_{nm}`. Governs 1/n-periodic solutions at diffusion `n²D`.
    pub fn unrolled(&self, n: usize) -> Result<Self> {
        check_period(n)?;
        let coeffs = (1..=self.max_mode() / n)
            .map(|m| n as f64 * self.coeff(n * m))
            .collect();
        Ok(Self::new(coeffs))
    }

    /// True when only modes divisible by `n` are present.
    pub fn has_period(&self, n: usize) -> bool {
        n >= 1 && self.modes().all(|(l, _)| l % n == 0)
    }

    /// `max V` over the circle.
    pub fn max_value(&self) -> f64 {
        maximize_periodic(|t| self.eval(t)).1
    }

    /// `max V'` over the circle.
    pub fn max_prime(&self) -> f64 {
        maximize_periodic(|t| self.eval_prime(t)).1
    }

    /// `min V'` over the circle.
    pub fn min_prime(&self) -> f64 {
        -maximize_periodic(|t| -self.eval_prime(t)).1
    }

    /// `max |V|`.
    pub fn sup_norm(&self) -> f64 {
        maximize_periodic(|t| self.eval(t).abs()).1
    }
}

fn check_period(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("periodicity n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Composite Simpson over `n` (even) panels of width `h`, integrand given by
/// node index.
fn simpson<F: Fn(usize) -> f64>(f: F, n: usize, h: f64) -> f64 {
    debug_assert!(n % 2 == 0);
    let mut acc = f(0) + f(n);
    for j in 1..n {
        acc += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j);
    }
    acc * h / 3.0
}

/// Maximize a smooth 1-periodic function: grid scan over [`SCAN_POINTS`]
/// nodes, then golden-section search in the bracketing cells.
/// Returns `(argmax in [0,1), max)`.
pub(crate) fn maximize_periodic<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    let h = 1.0 / SCAN_POINTS as f64;
    let (best_j, _) = (0..SCAN_POINTS)
        .map(|j| (j, f(j as f64 * h)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let centre = best_j as f64 * h;
    let (arg, val) = golden_section_max(&f, centre - h, centre + h, 1e-14);
    let grid_val = f(centre);
    let (arg, val) = if grid_val > val { (centre, grid_val) } else { (arg, val) };
    (arg.rem_euclid(1.0), val)
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin1_2() -> InteractionKernel {
        InteractionKernel::from_modes(&[(1, 1.0), (2, 2.0)]).unwrap()
    }

    #[test]
    fn eval_basic_values() {
        let v = InteractionKernel::from_modes(&[(1, 1.0)]).unwrap();
        assert!((v.eval(0.25) - 1.0).abs() < 1e-15);
        assert!((v.eval_prime(0.0) - TWO_PI).abs() < 1e-14);
        assert!((v.eval_prime(0.5) + TWO_PI).abs() < 1e-13);
        assert!((v.primitive(0.5) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(v.primitive(0.0), 0.0);
    }

    #[test]
    fn documented_zero_near_029() {
        assert!(sin1_2().eval(0.29).abs() < 5e-2);
    }

    #[test]
    fn direct_sum_of_terms() {
        let v = InteractionKernel::from_modes(&[(2, 1.0), (1, -3.0)]).unwrap();
        let t = 0.1f64;
        let expected = (4.0 * PI * t).sin() - 3.0 * (TWO_PI * t).sin();
        assert!((v.eval(t) - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_at_zero_and_half() {
        let v = InteractionKernel::new(vec![0.3, -1.2, 0.7, 2.0]);
        assert_eq!(v.eval(0.0), 0.0);
        // sin(lπ) is not exactly zero in floating point
        assert!(v.eval(0.5).abs() < 1e-14);
    }

    #[test]
    fn sine_coefficients() {
        let v = InteractionKernel::from_modes(&[(2, 1.0), (3, 0.5)]).unwrap();
        assert_eq!(v.sine_coefficient(3), 0.125);
        assert_eq!(v.sine_coefficient(-3), -0.125);
        assert_eq!(v.sine_coefficient(1), 0.0);
        assert_eq!(v.sine_coefficient(7), 0.0);
    }

    #[test]
    fn rolled_and_unrolled() {
        let v = sin1_2();
        assert_eq!(v.rolled_up(2).unwrap().coeffs(), &[0.0, 4.0]);
        assert_eq!(v.unrolled(2).unwrap().coeffs(), &[4.0]);
        assert_eq!(v.rolled_up(1).unwrap(), v);
        assert_eq!(v.unrolled(1).unwrap(), v);
        let odd_only = InteractionKernel::from_modes(&[(1, 1.0)]).unwrap();
        assert!(odd_only.unrolled(2).unwrap().is_zero());
        assert!(v.rolled_up(0).is_err());
    }

    #[test]
    fn rejects_mode_zero() {
        assert!(InteractionKernel::from_modes(&[(0, 1.0)]).is_err());
    }

    #[test]
    fn maxima() {
        let v = InteractionKernel::from_modes(&[(1, 1.0)]).unwrap();
        assert!((v.max_value() - 1.0).abs() < 1e-12);
        assert!((v.max_prime() - TWO_PI).abs() < 1e-9);
        assert!((v.min_prime() + TWO_PI).abs() < 1e-9);
    }

    #[test]
    fn projection_recovers_sine_series() {
        let v = InteractionKernel::from_modes(&[(1, 0.5), (3, -1.0)]).unwrap();
        let p = InteractionKernel::project(|t| v.eval(t), 6);
        for l in 1..=6 {
            assert!((p.coeff(l) - v.coeff(l)).abs() < 1e-12, "mode {l}");
        }
    }
}
