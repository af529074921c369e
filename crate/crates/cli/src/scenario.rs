//! Scenario files: TOML with `[kernel] [run] [init] [observe] [expect]`.
//!
//! ```toml
//! command = "simulate"
//!
//! [kernel]
//! V = [[1, 1.0], [2, 2.0]]
//!
//! [run]
//! D = 0.05
//! t_end = 30.0
//!
//! [init]
//! kind = "perturbed"
//! seed = 7
//! magnitude = 0.05
//!
//! [observe]
//! every = 1.0
//!
//! [expect]
//! checks = ["max_count == 2", "distance(max0,max1) ≈ 0.5 tol 0.01"]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tde_core::spectral::SolverConfig;
use tde_core::InteractionKernel;

use crate::error::CliError;
use crate::expect::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Stationary,
    Eigen,
    Peaks,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Stationary => "stationary",
            Command::Eigen => "eigen",
            Command::Peaks => "peaks",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    /// Used by `sweep`; single commands ignore it.
    pub command: Option<Command>,
    /// Output directory, relative to the scenario file.
    pub output: Option<PathBuf>,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub run: RunSection,
    pub init: Option<InitSpec>,
    #[serde(default)]
    pub observe: ObserveSection,
    #[serde(default)]
    pub expect: ExpectSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    /// `(mode, coefficient)` pairs of the sine series.
    #[serde(rename = "V")]
    pub v: Option<Vec<(usize, f64)>>,
    /// `odd_ramp` or `phase_modulated`.
    pub shape: Option<String>,
    pub knee: Option<f64>,
    pub alpha: Option<f64>,
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(rename = "D")]
    pub d: Option<f64>,
    pub mass: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub initial_modes: Option<usize>,
    pub max_modes: Option<usize>,
    pub mode_growth_threshold: Option<f64>,
    pub adapt_every: Option<usize>,
    pub pin_period: Option<usize>,
    pub advective_cfl: Option<f64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub forced_period: Option<usize>,
    pub merge: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    Constant,
    /// Constant plus a seeded Gaussian perturbation of the first `modes` modes.
    Perturbed {
        seed: u64,
        magnitude: f64,
        modes: Option<usize>,
    },
    /// `mass + Σ a cos(2πkθ) + Σ b sin(2πkθ)`.
    Cosine {
        #[serde(default)]
        cos: Vec<(usize, f64)>,
        #[serde(default)]
        sin: Vec<(usize, f64)>,
    },
    /// Samples on a uniform grid: one value per line, or a `theta,f` CSV.
    Grid { path: PathBuf },
    Peaks { positions: Vec<f64>, masses: Vec<f64> },
    /// Stationary solution of another kernel, computed by iteration.
    Stationary {
        #[serde(rename = "V")]
        v: Vec<(usize, f64)>,
        #[serde(rename = "D")]
        d: f64,
        grid: Option<usize>,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserveSection {
    /// Observation interval; absent means only the final state is written.
    pub every: Option<f64>,
    /// Snapshot resolution.
    pub grid: Option<usize>,
    /// Arcs `[lo, hi]` whose local mass and barycentre are recorded.
    #[serde(default)]
    pub intervals: Vec<(f64, f64)>,
    /// Number of leading modes written to the coefficient series.
    pub coefficients: Option<usize>,
    /// `[D_min, D_max, steps]` eigenvalue sweep for `eigen`.
    pub d_sweep: Option<(f64, f64, usize)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectSection {
    /// Exit code the scenario is meant to end with (default 0).
    pub exit: Option<i32>,
    #[serde(default)]
    pub checks: Vec<String>,
}

/// A parsed scenario together with where it came from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub path: PathBuf,
    pub checks: Vec<Check>,
}

impl Loaded {
    pub fn stem(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into())
    }

    pub fn base_dir(&self) -> PathBuf {
        self.path.parent().map(Path::to_path_buf).unwrap_or_default()
    }

    pub fn title(&self) -> String {
        self.scenario.name.clone().unwrap_or_else(|| self.stem())
    }
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<Loaded, CliError> {
    let scenario: Scenario = toml::from_str(text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    scenario.validate()?;
    let checks = scenario
        .expect
        .checks
        .iter()
        .map(|c| Check::parse(c).map_err(CliError::Config))
        .collect::<Result<_, _>>()?;
    Ok(Loaded {
        scenario,
        path: path.to_path_buf(),
        checks,
    })
}

fn config<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => config(format!("{name} must be positive, got {x}")),
        _ => Ok(()),
    }
}

impl Scenario {
    /// Checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        self.kernel.build()?;
        let r = &self.run;
        if let Some(d) = r.d {
            if !(d >= 0.0 && d.is_finite()) {
                return config(format!("D must be nonnegative, got {d}"));
            }
        }
        positive("mass", r.mass)?;
        positive("dt", r.dt)?;
        positive("tol", r.tol)?;
        positive("mode_growth_threshold", r.mode_growth_threshold)?;
        positive("advective_cfl", r.advective_cfl)?;
        if let Some(t) = r.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return config(format!("t_end must be nonnegative, got {t}"));
            }
        }
        positive("observe.every", self.observe.every)?;
        if let Some(g) = self.observe.grid {
            if g < 4 {
                return config("observe.grid must be at least 4");
            }
        }
        for &(lo, hi) in &self.observe.intervals {
            if !(hi > lo && hi - lo <= 1.0) {
                return config(format!("interval [{lo}, {hi}] must satisfy lo < hi <= lo + 1"));
            }
        }
        if let Some((lo, hi, n)) = self.observe.d_sweep {
            if !(lo >= 0.0 && hi > lo && n >= 2) {
                return config("d_sweep needs 0 <= D_min < D_max and at least 2 steps");
            }
        }
        if let Some(init) = &self.init {
            init.validate()?;
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.run.mass.unwrap_or(1.0)
    }

    pub fn diffusion(&self) -> Result<f64, CliError> {
        self.run.d.ok_or_else(|| CliError::Config("run.D is required".into()))
    }

    pub fn t_end(&self) -> Result<f64, CliError> {
        self.run.t_end.ok_or_else(|| CliError::Config("run.t_end is required".into()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        let r = &self.run;
        let initial_modes = r.initial_modes.unwrap_or(d.initial_modes);
        SolverConfig {
            dt: r.dt.unwrap_or(d.dt),
            mode_growth_threshold: r.mode_growth_threshold.unwrap_or(d.mode_growth_threshold),
            max_modes: r.max_modes.unwrap_or(d.max_modes.max(initial_modes)),
            initial_modes,
            adapt_every: r.adapt_every.unwrap_or(d.adapt_every),
            pin_period: r.pin_period.unwrap_or(d.pin_period),
            advective_cfl: r.advective_cfl.unwrap_or(d.advective_cfl),
        }
    }
}

impl KernelSpec {
    pub fn build(&self) -> Result<InteractionKernel, CliError> {
        match (&self.v, self.shape.as_deref()) {
            (Some(_), Some(_)) => config("kernel: give either V or shape, not both"),
            (None, None) => config("kernel: V or shape is required"),
            (Some(pairs), None) => {
                if self.knee.is_some() || self.alpha.is_some() || self.modes.is_some() {
                    return config("kernel: knee/alpha/modes only apply to a shape");
                }
                Ok(InteractionKernel::from_modes(pairs)?)
            }
            (None, Some(shape)) => {
                let modes = self.modes.unwrap_or(128);
                if modes == 0 {
                    return config("kernel.modes must be positive");
                }
                match shape {
                    "odd_ramp" => {
                        let knee = self
                            .knee
                            .ok_or_else(|| CliError::Config("odd_ramp needs knee".into()))?;
                        Ok(InteractionKernel::odd_ramp(knee, modes)?)
                    }
                    "phase_modulated" => {
                        let alpha = self
                            .alpha
                            .ok_or_else(|| CliError::Config("phase_modulated needs alpha".into()))?;
                        Ok(InteractionKernel::phase_modulated(alpha, modes))
                    }
                    other => config(format!("unknown kernel shape '{other}'")),
                }
            }
        }
    }
}

impl InitSpec {
    fn validate(&self) -> Result<(), CliError> {
        match self {
            InitSpec::Perturbed { magnitude, modes, .. } => {
                if !(*magnitude >= 0.0 && magnitude.is_finite()) {
                    return config("init.magnitude must be nonnegative");
                }
                if *modes == Some(0) {
                    return config("init.modes must be positive");
                }
            }
            InitSpec::Cosine { cos, sin } => {
                if cos.iter().chain(sin).any(|&(k, _)| k == 0) {
                    return config("init modes start at 1");
                }
            }
            InitSpec::Peaks { positions, masses } => {
                if positions.len() != masses.len() || positions.is_empty() {
                    return config("init.positions and init.masses need the same nonzero length");
                }
            }
            InitSpec::Stationary { v, d, .. } => {
                InteractionKernel::from_modes(v)?;
                if !(*d > 0.0) {
                    return config("init.D must be positive");
                }
            }
            InitSpec::Constant | InitSpec::Grid { .. } => {}
        }
        Ok(())
    }
}
