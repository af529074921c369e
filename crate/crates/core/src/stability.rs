//! Closed-form linear stability: the constant state and equidistant peak
//! configurations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kernel::InteractionKernel;
use crate::spectral::eigenvalue;

/// Stability data for the constant state `f ≡ mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantStateReport {
    /// `c_1..c_K`.
    pub eigenvalues: Vec<f64>,
    pub rho: f64,
    pub rho_prime: f64,
    /// Radius of the guaranteed basin in the weighted norm `Σ |f_k|²/k`.
    /// `None` when some `c_k ≥ 0`; `+∞` when `ρ = 0`.
    pub basin_radius: Option<f64>,
    /// Sufficient sup-norm bound on `‖f − mass‖∞` for the same basin.
    pub basin_sup_norm: Option<f64>,
    pub globally_stable: bool,
}

impl ConstantStateReport {
    pub fn unstable_modes(&self) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Eigenvalues, local basin and global stability of the constant state.
///
/// The kernel's sine coefficients are scaled by `mass`, which reduces the
/// problem to the unit-mass case. `k_max` is raised to `L` if smaller.
pub fn constant_state_report(
    kernel: &InteractionKernel,
    diffusion: f64,
    mass: f64,
    k_max: usize,
) -> ConstantStateReport {
    let l_max = kernel.max_mode();
    let k_max = k_max.max(l_max).max(1);
    let eigenvalues: Vec<f64> = (1..=k_max)
        .map(|k| eigenvalue(kernel, diffusion, mass, k))
        .collect();
    let v = |k: usize| mass * kernel.sine_coefficient(k as i64);

    let mut rho_sq: f64 = 0.0;
    let mut rho_prime = 0.0;
    for l in 1..=l_max {
        let lf = l as f64;
        let w = lf * (lf * lf - 1.0) / 6.0 * v(l) * v(l);
        rho_sq = rho_sq.max(lf * w);
        rho_prime += w;
    }
    let rho = rho_sq.sqrt();

    // −c_k is increasing for k > L, so k = L + 1 bounds the tail
    let tail = (1..=k_max.max(l_max + 1)).map(|k| -eigenvalue(kernel, diffusion, mass, k));
    let worst = tail.fold(f64::INFINITY, f64::min);
    let (basin_radius, basin_sup_norm) = if worst > 0.0 {
        if rho == 0.0 {
            (Some(f64::INFINITY), Some(f64::INFINITY))
        } else {
            (
                Some(worst / (4.0 * PI * rho)),
                Some(worst / (2.0 * 2f64.sqrt() * PI * rho)),
            )
        }
    } else {
        (None, None)
    };

    let head = (1..=k_max).all(|k| {
        let kf = k as f64;
        v(k) < PI * diffusion * kf - rho_prime / kf
    });
    // for k > K ≥ L the condition reads πDk² > ρ′, weakest at k = K + 1
    let rest = PI * diffusion * ((k_max + 1) as f64).powi(2) > rho_prime;
    ConstantStateReport {
        eigenvalues,
        rho,
        rho_prime,
        basin_radius,
        basin_sup_norm,
        globally_stable: head && rest,
    }
}

/// Samples used for sign scans on `]0, 1/2[`.
const SCAN_POINTS: usize = 10_000;

/// Sign conditions on `V` that force instability of mode 1 or 2 at small `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternConditions {
    pub n: usize,
    /// n = 1: `V > 0` on `]0, 1/2[`. n = 2: one zero `θ₀`, positive before, negative after.
    pub sign_pattern: bool,
    /// The zero `θ₀` for n = 2 when the sign pattern holds.
    pub zero: Option<f64>,
    /// `V(θ) ≥ V(1/2 − θ)` on `]min(θ₀, 1/2 − θ₀), 1/4[`; n = 2 only.
    pub star: Option<bool>,
    pub v_prime_zero: f64,
    pub v_prime_half: f64,
    pub holds: bool,
}

fn bisect_zero(kernel: &InteractionKernel, mut a: f64, mut b: f64) -> f64 {
    let fa = kernel.eval(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (kernel.eval(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Check the pattern-formation conditions for `n ∈ {1, 2}`.
pub fn pattern_conditions(kernel: &InteractionKernel, n: usize) -> Result<PatternConditions> {
    let v_prime_zero = kernel.eval_prime(0.0);
    let v_prime_half = kernel.eval_prime(0.5);
    let samples: Vec<(f64, f64)> = (1..SCAN_POINTS)
        .map(|i| {
            let t = 0.5 * i as f64 / SCAN_POINTS as f64;
            (t, kernel.eval(t))
        })
        .collect();
    match n {
        1 => {
            let ok = samples.iter().all(|&(_, v)| v > 0.0);
            Ok(PatternConditions {
                n,
                sign_pattern: ok,
                zero: None,
                star: None,
                v_prime_zero,
                v_prime_half,
                holds: ok,
            })
        }
        2 => {
            let changes: Vec<usize> = samples
                .windows(2)
                .enumerate()
                .filter(|(_, w)| (w[0].1 > 0.0) != (w[1].1 > 0.0))
                .map(|(i, _)| i)
                .collect();
            let pattern = changes.len() == 1
                && samples[0].1 > 0.0
                && samples[samples.len() - 1].1 < 0.0
                && samples.iter().all(|&(_, v)| v != 0.0);
            if !pattern {
                return Ok(PatternConditions {
                    n,
                    sign_pattern: false,
                    zero: None,
                    star: None,
                    v_prime_zero,
                    v_prime_half,
                    holds: false,
                });
            }
            let i = changes[0];
            let t0 = bisect_zero(kernel, samples[i].0, samples[i + 1].0);
            let lo = t0.min(0.5 - t0);
            let star = samples
                .iter()
                .filter(|&&(t, _)| t > lo && t < 0.25)
                .all(|&(t, v)| v - kernel.eval(0.5 - t) >= -1e-12);
            Ok(PatternConditions {
                n,
                sign_pattern: true,
                zero: Some(t0),
                star: Some(star),
                v_prime_zero,
                v_prime_half,
                holds: star,
            })
        }
        _ => Err(Error::InvalidArgument(format!(
            "pattern conditions exist for n = 1, 2 only, got {n}"
        ))),
    }
}

/// Linearization of the peak ODE about a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakLinearization {
    pub matrix: DMatrix<f64>,
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
}

/// `A[j][k] = m_k V′(θ_j − θ_k)` off the diagonal, rows summing to zero.
///
/// `A = B M` with `B` symmetric and `M = diag(m)`, so `M^{1/2} A M^{−1/2}` is
/// symmetric and the spectrum is real.
pub fn peak_linearization(
    kernel: &InteractionKernel,
    positions: &[f64],
    masses: &[f64],
) -> Result<PeakLinearization> {
    let n = positions.len();
    if n == 0 || masses.len() != n {
        return Err(Error::InvalidArgument(format!(
            "need matching nonempty positions and masses, got {} and {}",
            n,
            masses.len()
        )));
    }
    if masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument("peak masses must be positive".into()));
    }
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = 0.0;
        for k in 0..n {
            if j != k {
                let x = masses[k] * kernel.eval_prime(positions[j] - positions[k]);
                a[(j, k)] = x;
                diag -= x;
            }
        }
        a[(j, j)] = diag;
    }
    let sym = DMatrix::from_fn(n, n, |j, k| {
        let b = if j == k {
            a[(j, j)] / masses[j]
        } else {
            kernel.eval_prime(positions[j] - positions[k])
        };
        masses[j].sqrt() * b * masses[k].sqrt()
    });
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(PeakLinearization {
        matrix: a,
        eigenvalues,
    })
}

/// `λ_j = (1/n) Σ_{k=1}^{n−1} V′(k/n)(−1 + cos 2πjk/n)` for `n` equidistant
/// equal-mass peaks of total mass 1 (index order, `λ_0 = 0`).
pub fn equidistant_eigenvalues(kernel: &InteractionKernel, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let mut lam = vec![0.0; n];
    let nf = n as f64;
    for j in 1..=n / 2 {
        let s: f64 = (1..n)
            .map(|k| {
                let kf = k as f64;
                kernel.eval_prime(kf / nf) * (-1.0 + (2.0 * PI * (j * k) as f64 / nf).cos())
            })
            .sum();
        lam[j] = s / nf;
        lam[n - j] = s / nf;
    }
    lam
}

/// Spectrum when all `n` peaks sit at one point: `λ_0 = 0`, `λ_j = −V′(0)`.
pub fn coincident_eigenvalues(kernel: &InteractionKernel, n: usize) -> Vec<f64> {
    let mut lam = vec![-kernel.eval_prime(0.0); n];
    if let Some(first) = lam.first_mut() {
        *first = 0.0;
    }
    lam
}

/// Stability of `n` equidistant equal-mass peaks (modulo translation).
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub n: usize,
    /// `λ_0..λ_{n−1}`; for n = 1 the coincident-peak value `−V′(0)` stands in.
    pub eigenvalues: Vec<f64>,
    /// All `λ_j < 0` for `j ≥ 1` (for n = 1: `V′(0) > 0`).
    pub condition_star: bool,
    /// `V′(j/n) > 0` for all `1 ≤ j ≤ n − 1` (for n = 1: `V′(0) > 0`).
    pub sufficient: bool,
    pub stable: bool,
}

pub fn stability_verdict(kernel: &InteractionKernel, n: usize) -> Result<StabilityVerdict> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one peak".into()));
    }
    if n == 1 {
        let vp = kernel.eval_prime(0.0);
        return Ok(StabilityVerdict {
            n,
            eigenvalues: vec![0.0, -vp],
            condition_star: vp > 0.0,
            sufficient: vp > 0.0,
            stable: vp > 0.0,
        });
    }
    let eigenvalues = equidistant_eigenvalues(kernel, n);
    let star = eigenvalues[1..].iter().all(|&l| l < 0.0);
    let sufficient = (1..n).all(|j| kernel.eval_prime(j as f64 / n as f64) > 0.0);
    Ok(StabilityVerdict {
        n,
        eigenvalues,
        condition_star: star,
        sufficient,
        stable: star,
    })
}
