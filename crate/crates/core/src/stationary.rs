//! Stationary profiles by fixed-point iteration of
//!
//! ```text
//! D f' = −(V∗f) f   ⇒   f^{(n+1)}(θ) = Z exp(−(1/D) ∫_0^θ (V∗f^{(n)}))
//! ```
//!
//! plus residual and shape checks for candidate profiles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier;
use crate::kernel::InteractionKernel;
use crate::measures::{circle_distance, find_extrema, ExtremumKind, GridFunction};

/// Largest admissible spread of the exponent before `exp` loses range.
pub const EXPONENT_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationProblem {
    pub kernel: InteractionKernel,
    pub diffusion: f64,
    pub mass: f64,
    pub grid_size: usize,
    pub tol: f64,
    pub max_iters: usize,
    /// Solve in the class of `1/n`-periodic profiles (1 = unrestricted).
    pub forced_period: usize,
}

impl IterationProblem {
    /// Problem with the default tolerance `1e-10`, 5000 iterations and no forced period.
    pub fn new(kernel: InteractionKernel, diffusion: f64, grid_size: usize) -> Self {
        Self {
            kernel,
            diffusion,
            mass: 1.0,
            grid_size,
            tol: 1e-10,
            max_iters: 5000,
            forced_period: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diffusion > 0.0 && self.diffusion.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "diffusion must be positive, got {}",
                self.diffusion
            )));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidArgument("mass must be positive".into()));
        }
        if self.grid_size < 64 || self.grid_size % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "grid_size must be even and >= 64, got {}",
                self.grid_size
            )));
        }
        if 2 * self.kernel.max_mode() >= self.grid_size {
            return Err(Error::InvalidArgument(format!(
                "grid of {} points cannot resolve kernel mode {}",
                self.grid_size,
                self.kernel.max_mode()
            )));
        }
        if !(self.tol > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidArgument("tol and max_iters must be positive".into()));
        }
        if self.forced_period == 0 || self.grid_size % self.forced_period != 0 {
            return Err(Error::InvalidArgument(format!(
                "forced_period {} must divide grid_size {}",
                self.forced_period, self.grid_size
            )));
        }
        Ok(())
    }

    /// Equivalent unrestricted problem for `1/n`-periodic solutions: kernel `Ṽ_n`, diffusion `n²D`.
    fn compressed(&self) -> Result<Self> {
        let n = self.forced_period;
        Ok(Self {
            kernel: self.kernel.unrolled(n)?,
            diffusion: self.diffusion * (n * n) as f64,
            forced_period: 1,
            ..self.clone()
        })
    }

    fn check_input(&self, f: &GridFunction) -> Result<()> {
        if f.len() != self.grid_size {
            return Err(Error::InvalidArgument(format!(
                "initial profile has {} points, problem expects {}",
                f.len(),
                self.grid_size
            )));
        }
        if f.min() <= 0.0 {
            return Err(Error::InvalidArgument("initial profile must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationStatus {
    Converged,
    TwoCycle,
    MaxItersExceeded,
}

impl IterationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::TwoCycle => "two_cycle",
            Self::MaxItersExceeded => "max_iters_exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub status: IterationStatus,
    pub profile: GridFunction,
    /// Stationary-equation residual of `profile`.
    pub residual: f64,
    pub iterations: usize,
    /// Last one-step sup-norm change.
    pub last_change: f64,
}

/// `Z exp(−E/D)` normalised to `mass`, `E` shifted so its minimum is zero.
fn exponentiate(exponent: &[f64], diffusion: f64, mass: f64) -> Result<GridFunction> {
    let lo = exponent.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = exponent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = (hi - lo) / diffusion;
    if !(range <= EXPONENT_LIMIT) {
        return Err(Error::Overflow {
            range,
            limit: EXPONENT_LIMIT,
        });
    }
    let raw: Vec<f64> = exponent.iter().map(|e| (-(e - lo) / diffusion).exp()).collect();
    let z = mass * raw.len() as f64 / raw.iter().sum::<f64>();
    GridFunction::new(raw.into_iter().map(|v| v * z).collect())
}

/// One step of the fixed-point map.
pub fn iterate_once(f: &GridFunction, problem: &IterationProblem) -> Result<GridFunction> {
    let n = f.len();
    let coeffs = fourier::coefficients(f.values(), problem.kernel.max_mode());
    // termwise antiderivative of a_l (Re f_l sin wθ + Im f_l cos wθ), zero at θ = 0
    let mut prim = vec![0.0; n];
    for (l, a) in problem.kernel.modes() {
        if l >= coeffs.len() {
            break;
        }
        let fl = coeffs[l];
        let w = 2.0 * PI * l as f64;
        for (j, p) in prim.iter_mut().enumerate() {
            let t = w * j as f64 / n as f64;
            *p += a * (fl.re * (1.0 - t.cos()) + fl.im * t.sin()) / w;
        }
    }
    exponentiate(&prim, problem.diffusion, problem.mass)
}

/// `Z exp(−Φ/D)`, the stationary profile of `D f' = −V f`.
pub fn default_initial_guess(problem: &IterationProblem) -> Result<GridFunction> {
    let p = if problem.forced_period > 1 {
        problem.compressed()?
    } else {
        problem.clone()
    };
    let phi: Vec<f64> = (0..p.grid_size)
        .map(|j| p.kernel.primitive(j as f64 / p.grid_size as f64))
        .collect();
    let g = exponentiate(&phi, p.diffusion, p.mass)?;
    Ok(if problem.forced_period > 1 {
        unroll(&g, problem.forced_period)
    } else {
        g
    })
}

/// `f(θ) = g(nθ)` sampled on the same grid.
fn unroll(g: &GridFunction, n: usize) -> GridFunction {
    let m = g.len();
    GridFunction::new((0..m).map(|j| g.values()[(n * j) % m]).collect())
        .expect("unrolling keeps values finite")
}

/// `g(φ) = f(φ/n)` by trigonometric interpolation, renormalised to `mass`.
fn compress(f: &GridFunction, n: usize, mass: f64) -> Result<GridFunction> {
    let m = f.len();
    let spec = fourier::analyze(f.values());
    let mut vals: Vec<f64> = (0..m)
        .map(|j| fourier::eval_spectrum(&spec, m, j as f64 / (m * n) as f64, 0))
        .collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if lo <= 0.0 {
        return Err(Error::InvalidArgument(
            "initial profile becomes non-positive when compressed".into(),
        ));
    }
    let scale = mass * m as f64 / vals.iter().sum::<f64>();
    vals.iter_mut().for_each(|v| *v *= scale);
    GridFunction::new(vals)
}

/// Iterate from `f0` until convergence, a detected two-cycle, or `max_iters`.
pub fn solve(problem: &IterationProblem, f0: &GridFunction) -> Result<IterationOutcome> {
    problem.validate()?;
    problem.check_input(f0)?;
    if problem.forced_period > 1 {
        let n = problem.forced_period;
        let inner = problem.compressed()?;
        let g0 = compress(f0, n, problem.mass)?;
        let out = iterate(&inner, g0)?;
        let profile = unroll(&out.profile, n);
        let residual = stationary_residual(&profile, &problem.kernel, problem.diffusion);
        return Ok(IterationOutcome {
            profile,
            residual,
            ..out
        });
    }
    let mut start = f0.clone();
    if (start.mass() - problem.mass).abs() > 0.0 {
        let s = problem.mass / start.mass();
        start = GridFunction::new(start.values().iter().map(|v| v * s).collect())?;
    }
    iterate(problem, start)
}

fn iterate(problem: &IterationProblem, f0: GridFunction) -> Result<IterationOutcome> {
    let mut older: Option<GridFunction> = None;
    let mut cur = f0;
    let mut change = f64::INFINITY;
    for it in 1..=problem.max_iters {
        let next = iterate_once(&cur, problem)?;
        change = next.sup_distance(&cur);
        let status = if change <= problem.tol {
            Some(IterationStatus::Converged)
        } else if older
            .as_ref()
            .is_some_and(|o| next.sup_distance(o) <= problem.tol && change > 10.0 * problem.tol)
        {
            Some(IterationStatus::TwoCycle)
        } else {
            None
        };
        if let Some(status) = status {
            let residual = stationary_residual(&next, &problem.kernel, problem.diffusion);
            return Ok(IterationOutcome {
                status,
                profile: next,
                residual,
                iterations: it,
                last_change: change,
            });
        }
        older = Some(std::mem::replace(&mut cur, next));
    }
    let residual = stationary_residual(&cur, &problem.kernel, problem.diffusion);
    Ok(IterationOutcome {
        status: IterationStatus::MaxItersExceeded,
        profile: cur,
        residual,
        iterations: problem.max_iters,
        last_change: change,
    })
}

/// `max_j |D f'(θ_j) + (V∗f)(θ_j) f(θ_j)|`.
pub fn stationary_residual(f: &GridFunction, kernel: &InteractionKernel, diffusion: f64) -> f64 {
    let df = f.derivative(1);
    let conv = f.convolve(kernel);
    df.values()
        .iter()
        .zip(conv.values())
        .zip(f.values())
        .map(|((d, c), v)| (diffusion * d + c * v).abs())
        .fold(0.0, f64::max)
}

/// One inequality of the shape estimates; `margin = bound − value` in the
/// direction where positive means satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCheck {
    pub name: String,
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    /// `C = mass · max V / D`.
    pub c: f64,
    pub checks: Vec<ShapeCheck>,
}

impl ShapeReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&ShapeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Slack allowed on each inequality for discretisation error.
const SHAPE_SLACK: f64 = 1e-8;
/// At most this many grid points enter the pairwise check.
const PAIR_SAMPLES: usize = 256;

/// Check the a-priori bounds every stationary state satisfies:
/// `max f / min f ≤ e^{C/2}`, `f(θ₂) ≤ f(θ₁) e^{C|θ₁−θ₂|}`, and curvature
/// bounds `f'' ≥ −(max V'/D) f` at maxima and `f'' ≤ −(min V'/D) f` at minima.
pub fn check_shape_estimates(f: &GridFunction, kernel: &InteractionKernel, diffusion: f64) -> ShapeReport {
    let mass = f.mass();
    let c = mass * kernel.max_value().max(0.0) / diffusion;
    let mut checks = Vec::new();

    let log_ratio = (f.max() / f.min()).ln();
    let margin = c / 2.0 - log_ratio;
    checks.push(ShapeCheck {
        name: "ratio".into(),
        margin,
        passed: margin >= -SHAPE_SLACK,
    });

    let n = f.len();
    let stride = n.div_ceil(PAIR_SAMPLES).max(1);
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    let mut worst = f64::INFINITY;
    for &i in &idx {
        for &j in &idx {
            let d = circle_distance(f.theta(i), f.theta(j));
            let m = c * d - (f.values()[j] / f.values()[i]).ln();
            worst = worst.min(m);
        }
    }
    checks.push(ShapeCheck {
        name: "two_point".into(),
        margin: worst,
        passed: worst >= -SHAPE_SLACK,
    });

    let spec = fourier::analyze(f.values());
    let up = mass * kernel.max_prime() / diffusion;
    let down = mass * kernel.min_prime() / diffusion;
    let mut max_margin = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    for e in find_extrema(f) {
        let f2 = fourier::eval_spectrum(&spec, n, e.position, 2);
        match e.kind {
            ExtremumKind::Max => max_margin = max_margin.min(f2 + up * e.value),
            ExtremumKind::Min => min_margin = min_margin.min(-down * e.value - f2),
        }
    }
    let scale = SHAPE_SLACK * f.max().abs().max(1.0) * (1.0 + up.abs() + down.abs());
    checks.push(ShapeCheck {
        name: "curvature_max".into(),
        margin: max_margin,
        passed: max_margin >= -scale,
    });
    checks.push(ShapeCheck {
        name: "curvature_min".into(),
        margin: min_margin,
        passed: min_margin >= -scale,
    });
    ShapeReport { c, checks }
}
