//! wasm-bindgen bindings used by `www/index.html`.
//!
//! Kernels are passed as dense sine coefficients `a_1..a_L`.

use tde_core::rng::random_perturbation;
use tde_core::spectral::{self, SolverConfig, SpectralState};
use tde_core::stability::constant_state_report;
use tde_core::stationary::{self, default_initial_guess, IterationProblem};
use tde_core::{Error, InteractionKernel};
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn kernel(coeffs: &[f64]) -> Result<InteractionKernel, JsError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(JsError::new("kernel coefficients must be finite"));
    }
    Ok(InteractionKernel::new(coeffs.to_vec()))
}

/// Time-dependent spectral run that the page advances frame by frame.
#[wasm_bindgen]
pub struct Simulation {
    kernel: InteractionKernel,
    diffusion: f64,
    config: SolverConfig,
    state: SpectralState,
}

#[wasm_bindgen]
impl Simulation {
    /// Unit-mass constant state plus a seeded perturbation of the first 8 modes.
    #[wasm_bindgen(constructor)]
    pub fn new(coeffs: &[f64], diffusion: f64, magnitude: f64, seed: u32) -> Result<Simulation, JsError> {
        if !(diffusion >= 0.0) {
            return Err(JsError::new("D must be nonnegative"));
        }
        let config = SolverConfig {
            dt: 1e-3,
            max_modes: 256,
            ..SolverConfig::default()
        };
        let mut modes = random_perturbation(seed as u64, 8, magnitude);
        modes.resize(config.initial_modes.max(8), Default::default());
        Ok(Simulation {
            kernel: kernel(coeffs)?,
            diffusion,
            config,
            state: SpectralState::new(1.0, modes),
        })
    }

    pub fn advance(&mut self, duration: f64) -> Result<(), JsError> {
        let t_end = self.state.time + duration;
        let out = spectral::run(&self.state, &self.kernel, self.diffusion, &self.config, t_end, None, |_| {})
            .map_err(js_err)?;
        self.state = out.state;
        Ok(())
    }

    pub fn profile(&self, points: usize) -> Vec<f64> {
        spectral::to_grid(&self.state, points.max(4)).into_values()
    }

    #[wasm_bindgen(getter)]
    pub fn time(&self) -> f64 {
        self.state.time
    }

    #[wasm_bindgen(getter)]
    pub fn modes(&self) -> usize {
        self.state.num_modes()
    }

    #[wasm_bindgen(getter)]
    pub fn psi(&self) -> f64 {
        spectral::potential_psi(&self.state, &self.kernel)
    }
}

#[wasm_bindgen]
pub struct StationaryProfile {
    status: String,
    iterations: usize,
    residual: f64,
    values: Vec<f64>,
}

#[wasm_bindgen]
impl StationaryProfile {
    #[wasm_bindgen(getter)]
    pub fn status(&self) -> String {
        self.status.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
}

/// Fixed-point iteration from the default guess.
#[wasm_bindgen]
pub fn stationary_profile(coeffs: &[f64], diffusion: f64, grid: usize, forced_period: usize) -> Result<StationaryProfile, JsError> {
    let mut problem = IterationProblem::new(kernel(coeffs)?, diffusion, grid);
    problem.forced_period = forced_period.max(1);
    problem.validate().map_err(js_err)?;
    let guess = default_initial_guess(&problem).map_err(js_err)?;
    let out = stationary::solve(&problem, &guess).map_err(js_err)?;
    Ok(StationaryProfile {
        status: out.status.as_str().to_string(),
        iterations: out.iterations,
        residual: out.residual,
        values: out.profile.into_values(),
    })
}

/// `c_1..c_K` for the unit-mass constant state.
#[wasm_bindgen]
pub fn eigenvalues(coeffs: &[f64], diffusion: f64, k_max: usize) -> Result<Vec<f64>, JsError> {
    Ok(constant_state_report(&kernel(coeffs)?, diffusion, 1.0, k_max).eigenvalues)
}

/// Smallest `D` at which every mode of the constant state is stable.
#[wasm_bindgen]
pub fn critical_diffusion(coeffs: &[f64]) -> Result<f64, JsError> {
    let k = kernel(coeffs)?;
    Ok(k.modes()
        .map(|(l, _)| k.sine_coefficient(l as i64) / (std::f64::consts::PI * l as f64))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulation_keeps_mass_and_advances() {
        let mut sim = Simulation::new(&[1.0, 2.0], 0.05, 0.05, 3).unwrap();
        sim.advance(0.5).unwrap();
        assert!((sim.time() - 0.5).abs() < 1e-12);
        let p = sim.profile(128);
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_signs_flip_at_the_critical_diffusion() {
        let v = [1.0];
        let dc = critical_diffusion(&v).unwrap();
        assert!(eigenvalues(&v, 0.9 * dc, 1).unwrap()[0] > 0.0);
        assert!(eigenvalues(&v, 1.1 * dc, 1).unwrap()[0] < 0.0);
    }

    #[test]
    fn stationary_profile_is_normalized() {
        let s = stationary_profile(&[1.0], 0.05, 256, 1).unwrap();
        assert_eq!(s.status(), "converged");
        let mean = s.values().iter().sum::<f64>() / 256.0;
        assert!((mean - 1.0).abs() < 1e-10);
    }
}
