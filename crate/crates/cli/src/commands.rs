use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use tde_core::measures::{
    circle_distance, find_extrema, local_barycenter, local_mass, maxima_by_height, ExtremumKind,
};
use tde_core::peaks::{self, PeakConfiguration};
use tde_core::rng::random_perturbation;
use tde_core::spectral::{self, SpectralState};
use tde_core::stability::{constant_state_report, pattern_conditions, stability_verdict};
use tde_core::stationary::{
    self, check_shape_estimates, default_initial_guess, IterationProblem, IterationStatus,
};
use tde_core::{fourier, CircleInterval, GridFunction, InteractionKernel};

use crate::error::CliError;
use crate::expect::{run_checks, Facts};
use crate::output::{num, write_extrema, write_profile, KeyValues, OutDir};
use crate::scenario::{Command, InitSpec, Loaded, Scenario};

const DEFAULT_GRID: usize = 512;
const DEFAULT_SNAPSHOT_GRID: usize = 256;
const LISTED_MAXIMA: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct EigenArgs {
    pub k: usize,
    pub nmax: usize,
}

impl Default for EigenArgs {
    fn default() -> Self {
        Self { k: 8, nmax: 4 }
    }
}

/// Printable lines plus the final status of one scenario run.
#[derive(Debug)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub result: Result<(), CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.result.as_ref().err().map_or(0, CliError::exit_code)
    }
}

pub fn execute(command: Command, loaded: &Loaded, out: &Path, eigen: EigenArgs) -> Outcome {
    let mut lines = Vec::new();
    let result = OutDir::create(out.to_path_buf()).and_then(|out| {
        let (facts, status) = match command {
            Command::Simulate => simulate(loaded, &out, &mut lines),
            Command::Stationary => stationary(loaded, &out, &mut lines),
            Command::Eigen => eigen_report(loaded, &out, eigen, &mut lines),
            Command::Peaks => peak_run(loaded, &out, &mut lines),
        }?;
        let (checks, ok) = run_checks(&loaded.checks, &facts);
        lines.extend(checks);
        status?;
        if ok {
            Ok(())
        } else {
            let failed = lines.iter().filter(|l| l.contains(": FAIL (")).count();
            Err(CliError::Expectation(format!("{failed} of {} checks failed", loaded.checks.len())))
        }
    });
    Outcome { lines, result }
}

/// Facts plus a run status that only takes effect after the checks are printed.
type Run = Result<(Facts, Result<(), CliError>), CliError>;

fn profile_facts(facts: &mut Facts, f: &GridFunction) {
    let ext = find_extrema(f);
    let maxima = maxima_by_height(&ext);
    let (lo, hi) = (f.min(), f.max());
    let mean = f.mass();
    facts.set("max_count", maxima.len() as f64);
    facts.set("min_count", ext.iter().filter(|e| e.kind == ExtremumKind::Min).count() as f64);
    facts.set("max_f", hi);
    facts.set("min_f", lo);
    facts.set("max_over_min", if lo > 0.0 { hi / lo } else { f64::INFINITY });
    facts.set("deviation", f.values().iter().map(|v| (v - mean).abs()).fold(0.0, f64::max));
    facts.set("profile_mass", mean);
    let listed = &maxima[..maxima.len().min(LISTED_MAXIMA)];
    for (i, a) in listed.iter().enumerate() {
        facts.set(format!("height(max{i})"), a.value);
        facts.set(format!("position(max{i})"), a.position);
        facts.set(format!("prominence(max{i})"), a.prominence);
        for (j, b) in listed.iter().enumerate() {
            facts.set(format!("distance(max{i},max{j})"), circle_distance(a.position, b.position));
            facts.set(format!("ratio(max{i},max{j})"), a.value / b.value);
        }
    }
}

fn intervals(s: &Scenario) -> Result<Vec<CircleInterval>, CliError> {
    s.observe
        .intervals
        .iter()
        .map(|&(lo, hi)| CircleInterval::new(lo, hi).map_err(CliError::from))
        .collect()
}

fn read_grid(path: &Path) -> Result<GridFunction, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if values.is_empty() && n == 0 => continue,
            Err(_) => {
                return Err(CliError::Config(format!("{}:{}: bad value '{field}'", path.display(), n + 1)))
            }
        }
    }
    Ok(GridFunction::new(values)?)
}

/// Trigonometric resampling to `n` points, optionally rescaled to `mass`.
fn resample(f: &GridFunction, n: usize, mass: Option<f64>) -> Result<GridFunction, CliError> {
    let g = if f.len() == n {
        f.clone()
    } else {
        let spec = fourier::analyze(f.values());
        GridFunction::from_fn(n, |t| fourier::eval_spectrum(&spec, f.len(), t, 0))?
    };
    Ok(match mass {
        Some(m) => {
            let s = m / g.mass();
            GridFunction::new(g.values().iter().map(|v| v * s).collect())?
        }
        None => g,
    })
}

fn stationary_of(v: &[(usize, f64)], d: f64, grid: usize, mass: f64) -> Result<GridFunction, CliError> {
    let mut p = IterationProblem::new(InteractionKernel::from_modes(v)?, d, grid);
    p.mass = mass;
    let out = stationary::solve(&p, &default_initial_guess(&p)?)?;
    match out.status {
        IterationStatus::Converged => Ok(out.profile),
        IterationStatus::TwoCycle => Err(CliError::TwoCycle("initial profile".into())),
        IterationStatus::MaxItersExceeded => Err(CliError::NonConvergence("initial profile".into())),
    }
}

/// Initial density on a grid of `n` points (`None` for a constant start).
fn initial_grid(loaded: &Loaded, n: usize) -> Result<Option<GridFunction>, CliError> {
    let s = &loaded.scenario;
    let mass = s.mass();
    let explicit_mass = s.run.mass;
    Ok(match &s.init {
        None | Some(InitSpec::Constant) => None,
        Some(InitSpec::Perturbed { seed, magnitude, modes }) => {
            let amps = random_perturbation(*seed, modes.unwrap_or(10), *magnitude);
            Some(GridFunction::new(fourier::synthesize(mass, &amps, n))?)
        }
        Some(InitSpec::Cosine { cos, sin }) => Some(GridFunction::new(fourier::synthesize(
            mass,
            &cosine_modes(cos, sin),
            n,
        ))?),
        Some(InitSpec::Grid { path }) => {
            let g = read_grid(&loaded.base_dir().join(path))?;
            Some(resample(&g, n, explicit_mass)?)
        }
        Some(InitSpec::Stationary { v, d, grid }) => {
            let g = stationary_of(v, *d, grid.unwrap_or(DEFAULT_GRID), mass)?;
            Some(resample(&g, n, None)?)
        }
        Some(InitSpec::Peaks { .. }) => {
            return Err(CliError::Config("peak initial data only works with the peaks command".into()))
        }
    })
}

fn cosine_modes(cos: &[(usize, f64)], sin: &[(usize, f64)]) -> Vec<Complex64> {
    let top = cos.iter().chain(sin).map(|&(k, _)| k).max().unwrap_or(0);
    let mut modes = vec![Complex64::new(0.0, 0.0); top];
    for &(k, a) in cos {
        modes[k - 1] += Complex64::new(a / 2.0, 0.0);
    }
    for &(k, b) in sin {
        modes[k - 1] += Complex64::new(0.0, -b / 2.0);
    }
    modes
}

fn initial_state(loaded: &Loaded, k: usize) -> Result<SpectralState, CliError> {
    let s = &loaded.scenario;
    let mass = s.mass();
    let mut state = match &s.init {
        None | Some(InitSpec::Constant) => SpectralState::constant(mass, k),
        Some(InitSpec::Perturbed { seed, magnitude, modes }) => {
            SpectralState::new(mass, random_perturbation(*seed, modes.unwrap_or(10), *magnitude))
        }
        Some(InitSpec::Cosine { cos, sin }) => SpectralState::new(mass, cosine_modes(cos, sin)),
        Some(_) => {
            let n = (4 * k).max(DEFAULT_GRID);
            let g = initial_grid(loaded, n)?.expect("grid-valued initial data");
            spectral::from_grid(&g, k)
        }
    };
    // match the configured truncation exactly
    state.modes.resize(k, Complex64::new(0.0, 0.0));
    Ok(state)
}

fn analysis_grid(k: usize, requested: usize) -> usize {
    let n = requested.max(4 * k);
    n + n % 2
}

fn simulate(loaded: &Loaded, out: &OutDir, lines: &mut Vec<String>) -> Run {
    let s = &loaded.scenario;
    let kernel = s.kernel.build()?;
    let d = s.diffusion()?;
    let t_end = s.t_end()?;
    let cfg = s.solver_config();
    cfg.validate()?;
    let arcs = intervals(s)?;
    let init = initial_state(loaded, cfg.initial_modes)?;
    let snap_grid = s.observe.grid.unwrap_or(DEFAULT_SNAPSHOT_GRID);
    let coeff_limit = s.observe.coefficients;

    let mut coeffs = out.csv("coefficients.csv", &["t", "k", "re", "im"])?;
    let mut snaps = out.csv("snapshots.csv", &["t", "theta", "f"])?;
    let mut diag = out.csv("diagnostics.csv", &["t", "modes", "psi", "max_count", "min_f", "max_f"])?;
    let mut local = if arcs.is_empty() {
        None
    } else {
        Some(out.csv("local_masses.csv", &["t", "interval", "lo", "hi", "mass", "barycenter"])?)
    };
    let mut io_error: Option<CliError> = None;
    let mut first: Option<(f64, f64)> = None;
    let mut observe = |st: &SpectralState| {
        let res = (|| -> Result<(), CliError> {
            let t = num(st.time);
            let top = coeff_limit.unwrap_or(st.num_modes()).min(st.num_modes());
            for k in 1..=top {
                let c = st.coeff(k as i64);
                coeffs.row([t.clone(), k.to_string(), num(c.re), num(c.im)])?;
            }
            let g = spectral::to_grid(st, snap_grid);
            for (j, v) in g.values().iter().enumerate() {
                snaps.row([t.clone(), num(g.theta(j)), num(*v)])?;
            }
            let fine = spectral::to_grid(st, analysis_grid(st.num_modes(), snap_grid));
            let count = maxima_by_height(&find_extrema(&fine)).len();
            first.get_or_insert((fine.max(), count as f64));
            diag.row([
                t.clone(),
                st.num_modes().to_string(),
                num(spectral::potential_psi(st, &kernel)),
                count.to_string(),
                num(fine.min()),
                num(fine.max()),
            ])?;
            if let Some(w) = local.as_mut() {
                for (i, arc) in arcs.iter().enumerate() {
                    let bary = local_barycenter(&fine, arc).map_or(f64::NAN, |b| b);
                    w.row([t.clone(), i.to_string(), num(arc.lo()), num(arc.hi()), num(local_mass(&fine, arc)), num(bary)])?;
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            io_error.get_or_insert(e);
        }
    };
    let run = spectral::run(&init, &kernel, d, &cfg, t_end, s.observe.every, &mut observe);
    coeffs.finish()?;
    snaps.finish()?;
    diag.finish()?;
    if let Some(w) = local {
        w.finish()?;
    }
    if let Some(e) = io_error {
        return Err(e);
    }
    let run = run?;
    let state = &run.state;
    let fine = spectral::to_grid(state, analysis_grid(state.num_modes(), snap_grid));
    let ext = find_extrema(&fine);
    write_extrema(out, "extrema.csv", &ext)?;

    let mut facts = Facts::default();
    profile_facts(&mut facts, &fine);
    let psi = spectral::potential_psi(state, &kernel);
    let (max0, count0) = first.unwrap_or((fine.max(), 0.0));
    facts.set("time", state.time);
    facts.set("modes", state.num_modes() as f64);
    facts.set("steps", run.steps as f64);
    facts.set("dt", run.dt);
    facts.set("psi", psi);
    facts.set("initial_max_f", max0);
    facts.set("initial_max_count", count0);
    facts.set("max_growth", fine.max() / max0);
    for (i, arc) in arcs.iter().enumerate() {
        facts.set(format!("local_mass({i})"), local_mass(&fine, arc));
        if let Ok(b) = local_barycenter(&fine, arc) {
            facts.set(format!("barycenter({i})"), b);
        }
    }

    let mut kv = KeyValues::default();
    kv.push("scenario", loaded.title());
    kv.push("command", "simulate");
    kv.num("t", state.time);
    kv.push("modes", state.num_modes().to_string());
    kv.push("steps", run.steps.to_string());
    kv.num("dt", run.dt);
    kv.num("psi", psi);
    kv.push("max_count", (facts.number("max_count").unwrap_or(0.0) as usize).to_string());
    kv.num("max_f", fine.max());
    kv.num("min_f", fine.min());
    out.write("summary.txt", &kv.render())?;
    lines.extend(kv.render().lines().map(str::to_string));
    Ok((facts, Ok(())))
}

fn stationary(loaded: &Loaded, out: &OutDir, lines: &mut Vec<String>) -> Run {
    let s = &loaded.scenario;
    let kernel = s.kernel.build()?;
    let d = s.diffusion()?;
    let grid = s.run.grid.unwrap_or(DEFAULT_GRID);
    let mut p = IterationProblem::new(kernel.clone(), d, grid);
    p.mass = s.mass();
    if let Some(t) = s.run.tol {
        p.tol = t;
    }
    if let Some(m) = s.run.max_iters {
        p.max_iters = m;
    }
    p.forced_period = s.run.forced_period.unwrap_or(1);
    p.validate()?;
    let f0 = match initial_grid(loaded, grid)? {
        Some(g) => g,
        None => default_initial_guess(&p)?,
    };
    let res = stationary::solve(&p, &f0)?;
    write_profile(out, "profile.csv", &res.profile)?;
    let ext = find_extrema(&res.profile);
    write_extrema(out, "extrema.csv", &ext)?;
    let shape = check_shape_estimates(&res.profile, &kernel, d);
    let ratio = res.profile.max() / res.profile.min();

    let mut kv = KeyValues::default();
    kv.push("status", res.status.as_str());
    kv.push("iterations", res.iterations.to_string());
    kv.num("residual", res.residual);
    kv.num("last_change", res.last_change);
    kv.num("max_min_ratio", ratio);
    kv.num("C", shape.c);
    kv.num("exp_half_C", (shape.c / 2.0).exp());
    for c in &shape.checks {
        kv.push(format!("shape_{}", c.name), c.passed.to_string());
        kv.num(format!("shape_{}_margin", c.name), c.margin);
    }
    out.write("summary.json", &kv.render_json())?;
    lines.push(format!("scenario = {}", loaded.title()));
    lines.push("command = stationary".into());
    lines.extend(kv.render().lines().map(str::to_string));

    let mut facts = Facts::default();
    profile_facts(&mut facts, &res.profile);
    facts.set_word("status", res.status.as_str());
    facts.set("iterations", res.iterations as f64);
    facts.set("residual", res.residual);
    facts.set("last_change", res.last_change);
    facts.set("C", shape.c);
    facts.set("exp_half_C", (shape.c / 2.0).exp());
    facts.set_flag("shape_ok", shape.all_passed());
    let status = match res.status {
        IterationStatus::Converged => Ok(()),
        IterationStatus::TwoCycle => Err(CliError::TwoCycle(format!(
            "after {} iterations, one-step change {:.3e}",
            res.iterations, res.last_change
        ))),
        IterationStatus::MaxItersExceeded => Err(CliError::NonConvergence(format!(
            "{} iterations, last change {:.3e}",
            res.iterations, res.last_change
        ))),
    };
    Ok((facts, status))
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), num)
}

fn eigen_report(loaded: &Loaded, out: &OutDir, args: EigenArgs, lines: &mut Vec<String>) -> Run {
    let s = &loaded.scenario;
    let kernel = s.kernel.build()?;
    let d = s.diffusion()?;
    let mass = s.mass();
    if args.k == 0 || args.nmax == 0 {
        return Err(CliError::Config("--K and --nmax must be positive".into()));
    }
    let rep = constant_state_report(&kernel, d, mass, args.k);
    let mut facts = Facts::default();
    let mut kv = KeyValues::default();
    kv.push("scenario", loaded.title());
    kv.num("D", d);
    kv.num("mass", mass);
    kv.push("K", args.k.to_string());
    kv.num("rho", rep.rho);
    kv.num("rho_prime", rep.rho_prime);
    kv.push("basin_radius", opt_num(rep.basin_radius));
    kv.push("basin_sup_norm", opt_num(rep.basin_sup_norm));
    kv.push("globally_stable", flag(rep.globally_stable));
    let unstable = rep.unstable_modes();
    kv.push(
        "unstable_modes",
        unstable.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
    );
    facts.set("rho", rep.rho);
    facts.set("rho_prime", rep.rho_prime);
    facts.set("basin_radius", rep.basin_radius.unwrap_or(f64::NAN));
    facts.set_flag("globally_stable", rep.globally_stable);
    facts.set("unstable_count", unstable.len() as f64);
    for (i, c) in rep.eigenvalues.iter().enumerate() {
        let k = i + 1;
        facts.set(format!("c({k})"), *c);
        facts.set_flag(format!("unstable({k})"), *c > 0.0);
        let v = mass * kernel.sine_coefficient(k as i64);
        if v > 0.0 {
            facts.set(format!("critical_D({k})"), v / (PI * k as f64));
        }
    }
    for n in 1..=2 {
        let pc = pattern_conditions(&kernel, n)?;
        kv.push(format!("pattern_{n}"), flag(pc.holds));
        kv.push(format!("pattern_{n}_sign"), flag(pc.sign_pattern));
        if n == 2 {
            kv.push("pattern_2_zero", opt_num(pc.zero));
            kv.push("pattern_2_star", pc.star.map_or("none".into(), flag));
        }
        facts.set_flag(format!("pattern({n})"), pc.holds);
    }
    kv.num("v_prime_zero", kernel.eval_prime(0.0));
    kv.num("v_prime_half", kernel.eval_prime(0.5));
    kv.push("nmax", args.nmax.to_string());

    let mut text = kv.render();
    text.push_str("\nk,c_k\n");
    for (i, c) in rep.eigenvalues.iter().enumerate() {
        text.push_str(&format!("{},{}\n", i + 1, num(*c)));
    }
    let mut verdicts = String::from("\nn,condition_star,sufficient,stable\n");
    text.push_str("\nn,j,lambda_j\n");
    for n in 1..=args.nmax {
        let verdict = stability_verdict(&kernel, n)?;
        for (j, l) in verdict.eigenvalues.iter().enumerate() {
            text.push_str(&format!("{n},{j},{}\n", num(*l)));
            facts.set(format!("lambda({n},{j})"), *l);
        }
        verdicts.push_str(&format!(
            "{n},{},{},{}\n",
            verdict.condition_star, verdict.sufficient, verdict.stable
        ));
        facts.set_flag(format!("stable({n})"), verdict.stable);
        facts.set_flag(format!("sufficient({n})"), verdict.sufficient);
        facts.set_flag(format!("condition_star({n})"), verdict.condition_star);
    }
    text.push_str(&verdicts);
    out.write("eigen.txt", &text)?;
    lines.extend(text.lines().map(str::to_string));

    if let Some((lo, hi, steps)) = s.observe.d_sweep {
        let mut header = vec!["D".to_string()];
        header.extend((1..=args.k).map(|k| format!("c_{k}")));
        header.push("unstable".into());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut w = out.csv("sweep.csv", &header)?;
        for i in 0..steps {
            let dd = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            let cs: Vec<f64> = (1..=args.k).map(|k| spectral::eigenvalue(&kernel, dd, mass, k)).collect();
            let mut row = vec![num(dd)];
            row.extend(cs.iter().map(|c| num(*c)));
            row.push(cs.iter().filter(|c| **c > 0.0).count().to_string());
            w.row(row)?;
        }
        w.finish()?;
    }
    Ok((facts, Ok(())))
}

fn peak_run(loaded: &Loaded, out: &OutDir, lines: &mut Vec<String>) -> Run {
    let s = &loaded.scenario;
    let kernel = s.kernel.build()?;
    let Some(InitSpec::Peaks { positions, masses }) = &s.init else {
        return Err(CliError::Config("peaks needs init.kind = \"peaks\"".into()));
    };
    let config = PeakConfiguration::new(positions.clone(), masses.clone())?;
    let dt = s.run.dt.unwrap_or(1e-3);
    let t_end = s.t_end()?;
    let traj = peaks::integrate(&config, &kernel, dt, t_end, s.observe.every, s.run.merge.unwrap_or(false))?;

    let mut w = out.csv("trajectory.csv", &["t", "j", "theta_j", "m_j"])?;
    let mut p = out.csv("potential.csv", &["t", "Psi", "naive_moment"])?;
    for smp in &traj.samples {
        let t = num(smp.time);
        for (j, (x, m)) in smp.lifted.iter().zip(&smp.masses).enumerate() {
            w.row([t.clone(), j.to_string(), num(*x), num(*m)])?;
        }
        p.row([t, num(smp.psi), num(smp.naive_moment)])?;
    }
    w.finish()?;
    p.finish()?;

    let first = &traj.samples[0];
    let last = traj.samples.last().expect("at least the initial sample");
    let net_increase = traj
        .samples
        .windows(2)
        .map(|w| w[1].psi - w[0].psi)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut facts = Facts::default();
    facts.set("time", last.time);
    facts.set("count", last.lifted.len() as f64);
    facts.set("psi", last.psi);
    facts.set("initial_psi", first.psi);
    facts.set("max_psi_increase", if traj.samples.len() > 1 { net_increase } else { 0.0 });
    facts.set("moment", last.naive_moment);
    facts.set("initial_moment", first.naive_moment);
    facts.set("lifted_sum", last.lifted.iter().sum());
    facts.set("initial_lifted_sum", first.lifted.iter().sum());
    for (i, (x, m)) in last.lifted.iter().zip(&last.masses).enumerate() {
        facts.set(format!("lifted(p{i})"), *x);
        facts.set(format!("position(p{i})"), last.positions[i]);
        facts.set(format!("mass(p{i})"), *m);
        for (j, y) in last.lifted.iter().enumerate() {
            facts.set(format!("distance(p{i},p{j})"), circle_distance(*x, *y));
        }
    }

    let mut kv = KeyValues::default();
    kv.push("scenario", loaded.title());
    kv.push("command", "peaks");
    kv.num("t", last.time);
    kv.push("peaks", last.lifted.len().to_string());
    kv.num("psi", last.psi);
    kv.num("naive_moment", last.naive_moment);
    for (i, x) in last.lifted.iter().enumerate() {
        kv.num(format!("theta_{i}"), *x);
    }
    out.write("summary.txt", &kv.render())?;
    lines.extend(kv.render().lines().map(str::to_string));
    Ok((facts, Ok(())))
}
