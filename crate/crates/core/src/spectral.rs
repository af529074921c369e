//! Time integration of the Fourier-transformed transport-diffusion system
//!
//! ```text
//! ḟ_k = c_k f_k + 4πk Σ_{l≠0,k} v_l f_l f_{k−l},   c_k = −(2πk)² D + 4πk f_0 v_k
//! ```
//!
//! The linear part is integrated exactly through the factor `e^{c_k t}`; the
//! quadratic part is advanced with Heun's method on `g_k = f_k e^{−c_k t}`.
//! Because the kernel is a short sine series, every convolution sum has at
//! most `2L` terms and one right-hand side costs `O(K·L)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier;
use crate::kernel::InteractionKernel;
use crate::measures::GridFunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitude factor (relative to the mass) that triggers a step retry.
const RETRY_AMPLITUDE: f64 = 10.0;
/// Hard cap on any coefficient magnitude.
const BLOWUP_AMPLITUDE: f64 = 1e6;
/// Maximum successive dt halvings before giving up.
const MAX_HALVINGS: u32 = 30;

/// Truncated Fourier coefficients of a real density on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    /// `f_0`, the total mass. Never changes along a trajectory.
    pub mass: f64,
    /// `f_1..f_K`; `f_{−k} = conj(f_k)` is implicit.
    pub modes: Vec<Complex64>,
    pub time: f64,
}

impl SpectralState {
    /// Constant density with `k` zero modes.
    pub fn constant(mass: f64, k: usize) -> Self {
        Self {
            mass,
            modes: vec![ZERO; k],
            time: 0.0,
        }
    }

    pub fn new(mass: f64, modes: Vec<Complex64>) -> Self {
        Self {
            mass,
            modes,
            time: 0.0,
        }
    }

    /// Number of live modes `K`.
    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    /// `f_m` for any integer `m`, zero outside the live window.
    pub fn coeff(&self, m: i64) -> Complex64 {
        let k = m.unsigned_abs() as usize;
        if m == 0 {
            Complex64::new(self.mass, 0.0)
        } else if k > self.modes.len() {
            ZERO
        } else if m > 0 {
            self.modes[k - 1]
        } else {
            self.modes[k - 1].conj()
        }
    }

    /// `max_k |f_k|` over `k ≥ 1`.
    pub fn max_amplitude(&self) -> f64 {
        self.modes.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Upper bound `2 Σ |f_k|` on `‖f − f_0‖∞`.
    pub fn deviation_bound(&self) -> f64 {
        2.0 * self.modes.iter().map(|c| c.norm()).sum::<f64>()
    }

    fn is_finite(&self) -> bool {
        self.modes.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Zero every mode not divisible by `n`.
    pub fn pin_period(&mut self, n: usize) {
        if n > 1 {
            for (i, c) in self.modes.iter_mut().enumerate() {
                if (i + 1) % n != 0 {
                    *c = ZERO;
                }
            }
        }
    }
}

/// Step-size and truncation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    /// Slope magnitude of an unresolved mode that triggers truncation growth.
    pub mode_growth_threshold: f64,
    pub max_modes: usize,
    pub initial_modes: usize,
    /// Check for mode growth every this many steps (0 disables adaptation).
    pub adapt_every: usize,
    /// Keep only modes divisible by this (1 = no pinning).
    pub pin_period: usize,
    /// Bound on `dt · 4πK Σ|v_l||f_l|`; infinite means the step is never capped.
    pub advective_cfl: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            mode_growth_threshold: 1e-9,
            max_modes: 1024,
            initial_modes: 20,
            adapt_every: 1,
            pin_period: 1,
            advective_cfl: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if self.initial_modes == 0 || self.initial_modes > self.max_modes {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= initial_modes ({}) <= max_modes ({})",
                self.initial_modes, self.max_modes
            )));
        }
        if !(self.mode_growth_threshold > 0.0) {
            return Err(Error::InvalidArgument(
                "mode_growth_threshold must be positive".into(),
            ));
        }
        if !(self.advective_cfl > 0.0) {
            return Err(Error::InvalidArgument("advective_cfl must be positive".into()));
        }
        if self.pin_period == 0 {
            return Err(Error::InvalidArgument("pin_period must be >= 1".into()));
        }
        Ok(())
    }
}

/// Growth rate `c_k = −(2πk)² D + 4πk · mass · v_k` of mode `k` about the constant state.
pub fn eigenvalue(kernel: &InteractionKernel, diffusion: f64, mass: f64, k: usize) -> f64 {
    let kf = k as f64;
    -(2.0 * PI * kf).powi(2) * diffusion + 4.0 * PI * kf * mass * kernel.sine_coefficient(k as i64)
}

/// Quadratic part `4πk Σ_{l≠0,k} v_l f_l f_{k−l}` for `k = 1..=k_max`,
/// indices outside `[−K, K]` contributing zero.
pub fn nonlinear_term(state: &SpectralState, kernel: &InteractionKernel, k_max: usize) -> Vec<Complex64> {
    let live: Vec<(i64, f64)> = kernel
        .modes()
        .map(|(l, a)| (l as i64, a / 4.0))
        .filter(|&(l, _)| l as usize <= state.num_modes())
        .collect();
    (1..=k_max as i64)
        .map(|k| {
            let mut acc = ZERO;
            for &(l, v) in &live {
                // positive l: v_l f_l f_{k−l}; negative: v_{−l} f_{−l} f_{k+l} = −v_l conj(f_l) f_{k+l}
                if l != k {
                    acc += v * state.coeff(l) * state.coeff(k - l);
                }
                acc -= v * state.coeff(-l) * state.coeff(k + l);
            }
            acc * (4.0 * PI * k as f64)
        })
        .collect()
}

/// Largest step with `dt · 4πK Σ|v_l||f_l| <= cfl`.
pub fn advective_step_limit(state: &SpectralState, kernel: &InteractionKernel, cfl: f64) -> f64 {
    let rate: f64 = kernel
        .modes()
        .filter(|&(l, _)| l <= state.num_modes())
        .map(|(l, a)| 0.25 * a.abs() * state.coeff(l as i64).norm())
        .sum::<f64>()
        * 4.0
        * PI
        * state.num_modes() as f64;
    if rate > 0.0 {
        cfl / rate
    } else {
        f64::INFINITY
    }
}

/// Full right-hand side `ḟ_1..ḟ_{k_max}` (modes beyond `K` are taken as zero).
pub fn rhs_extended(
    state: &SpectralState,
    kernel: &InteractionKernel,
    diffusion: f64,
    k_max: usize,
) -> Vec<Complex64> {
    let mut out = nonlinear_term(state, kernel, k_max);
    for (i, o) in out.iter_mut().enumerate() {
        let k = i + 1;
        *o += eigenvalue(kernel, diffusion, state.mass, k) * state.coeff(k as i64);
    }
    out
}

/// `ḟ_1..ḟ_K`.
pub fn rhs(state: &SpectralState, kernel: &InteractionKernel, diffusion: f64) -> Vec<Complex64> {
    rhs_extended(state, kernel, diffusion, state.num_modes())
}

/// One integrating-factor Heun step of size `dt`.
pub fn step(
    state: &SpectralState,
    kernel: &InteractionKernel,
    diffusion: f64,
    dt: f64,
) -> Result<SpectralState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let k = state.num_modes();
    let growth: Vec<f64> = (1..=k)
        .map(|m| (eigenvalue(kernel, diffusion, state.mass, m) * dt).exp())
        .collect();
    let n1 = nonlinear_term(state, kernel, k);
    let mut predictor = state.clone();
    for i in 0..k {
        predictor.modes[i] = growth[i] * (state.modes[i] + dt * n1[i]);
    }
    let n2 = nonlinear_term(&predictor, kernel, k);
    let mut next = state.clone();
    for i in 0..k {
        next.modes[i] = growth[i] * (state.modes[i] + 0.5 * dt * n1[i]) + 0.5 * dt * n2[i];
    }
    next.time = state.time + dt;
    if !next.is_finite() {
        return Err(Error::BlowUp {
            time: next.time,
            reason: "non-finite Fourier coefficient".into(),
        });
    }
    Ok(next)
}

/// Grow the truncation when an unresolved mode has a non-negligible slope.
///
/// `extended` holds `ḟ_1..ḟ_{2K}` evaluated with `f_k = 0` for `k > K`.
/// The largest `k̃ > K` with `|ḟ_{k̃}| > threshold` raises `K` to `k̃ + 1`.
pub fn adapt_modes(
    state: &SpectralState,
    extended: &[Complex64],
    config: &SolverConfig,
) -> Result<SpectralState> {
    let k = state.num_modes();
    let hit = extended
        .iter()
        .enumerate()
        .skip(k)
        .filter(|(i, _)| (i + 1) % config.pin_period == 0)
        .filter(|(_, s)| s.norm() > config.mode_growth_threshold)
        .map(|(i, _)| i + 1)
        .max();
    match hit {
        None => Ok(state.clone()),
        Some(kt) => {
            let wanted = kt + 1;
            if wanted > config.max_modes {
                return Err(Error::Saturation {
                    time: state.time,
                    requested: wanted,
                    limit: config.max_modes,
                });
            }
            let mut grown = state.clone();
            grown.modes.resize(wanted, ZERO);
            Ok(grown)
        }
    }
}

/// Summary of a finished run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SpectralState,
    pub steps: usize,
    /// Step size in force at the end (after any automatic halving).
    pub dt: f64,
}

/// Integrate from `initial` to `t_end`.
///
/// `observe` is called with the initial state, at every multiple of
/// `observe_every` after the start (when given), and with the final state.
pub fn run<F>(
    initial: &SpectralState,
    kernel: &InteractionKernel,
    diffusion: f64,
    config: &SolverConfig,
    t_end: f64,
    observe_every: Option<f64>,
    mut observe: F,
) -> Result<RunOutcome>
where
    F: FnMut(&SpectralState),
{
    config.validate()?;
    if diffusion < 0.0 {
        return Err(Error::InvalidArgument("diffusion must be nonnegative".into()));
    }
    let mut state = initial.clone();
    state.pin_period(config.pin_period);
    observe(&state);
    if t_end <= state.time {
        return Ok(RunOutcome {
            state,
            steps: 0,
            dt: config.dt,
        });
    }
    let mut dt = config.dt;
    let mut steps = 0usize;
    let start = state.time;
    let mut obs_index = 1u64;
    let next_obs = |i: u64| observe_every.map(|e| start + e * i as f64);
    // Tolerance for landing on observation / end times.
    let eps = 1e-12 * t_end.abs().max(1.0);

    while state.time < t_end - eps {
        let target = match next_obs(obs_index) {
            Some(t) if t < t_end - eps => t,
            _ => t_end,
        };
        let cap = advective_step_limit(&state, kernel, config.advective_cfl);
        let mut halvings = 0;
        let next = loop {
            let h_try = dt.min(cap).min(target - state.time);
            match step(&state, kernel, diffusion, h_try) {
                Ok(s) if s.max_amplitude() <= RETRY_AMPLITUDE * state.mass.abs() => break s,
                outcome => {
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        let reason = match outcome {
                            Err(e) => e.to_string(),
                            Ok(s) => format!("coefficient amplitude {:.3e}", s.max_amplitude()),
                        };
                        return Err(Error::BlowUp {
                            time: state.time,
                            reason,
                        });
                    }
                    dt *= 0.5;
                }
            }
        };
        state = next;
        // snap onto the target to keep observation times exact
        if (state.time - target).abs() <= eps {
            state.time = target;
        }
        state.pin_period(config.pin_period);
        steps += 1;
        if state.max_amplitude() > BLOWUP_AMPLITUDE {
            return Err(Error::BlowUp {
                time: state.time,
                reason: format!("coefficient amplitude {:.3e}", state.max_amplitude()),
            });
        }
        if config.adapt_every > 0 && steps % config.adapt_every == 0 {
            let k = state.num_modes();
            let extended = rhs_extended(&state, kernel, diffusion, 2 * k);
            state = adapt_modes(&state, &extended, config)?;
        }
        if let Some(t_obs) = next_obs(obs_index) {
            if state.time >= t_obs - eps && state.time < t_end - eps {
                observe(&state);
                obs_index += 1;
            }
        }
    }
    state.time = state.time.max(t_end);
    observe(&state);
    Ok(RunOutcome { state, steps, dt })
}

/// Synthesize `f(θ_j) = f_0 + 2 Σ Re(f_k e^{2πikθ_j})` on `grid_size` points.
pub fn to_grid(state: &SpectralState, grid_size: usize) -> GridFunction {
    GridFunction::new(fourier::synthesize(state.mass, &state.modes, grid_size))
        .expect("synthesis of finite coefficients is finite")
}

/// Discrete Fourier coefficients `f_0..f_K` of a grid function (K ≤ N/2).
pub fn from_grid(grid: &GridFunction, k: usize) -> SpectralState {
    let c = fourier::coefficients(grid.values(), k);
    SpectralState {
        mass: c[0].re,
        modes: c[1..].to_vec(),
        time: 0.0,
    }
}

/// Interaction potential of a spectral state, `Φ̄ f_0² − Σ a_l |f_l|²/(2πl)`.
pub fn potential_psi(state: &SpectralState, kernel: &InteractionKernel) -> f64 {
    let mut psi = kernel.primitive_mean() * state.mass * state.mass;
    for (l, a) in kernel.modes() {
        psi -= a * state.coeff(l as i64).norm_sqr() / (2.0 * PI * l as f64);
    }
    psi
}
