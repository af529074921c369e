//! Dynamics of finitely many delta peaks at zero diffusion,
//!
//! ```text
//! dθ_j/dt = −Σ_k m_k V(θ_j − θ_k)
//! ```
//!
//! integrated with classical RK4. Positions are carried on continuous lifts
//! during integration so that wrap-around is visible to callers.

use crate::error::{Error, Result};
use crate::kernel::InteractionKernel;
use crate::measures::{circle_distance, lift_centered, wrap};

/// Peaks closer than this merge when merging is requested.
pub const MERGE_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PeakConfiguration {
    /// Continuous lifts; [`PeakConfiguration::positions`] reduces them mod 1.
    lifted: Vec<f64>,
    masses: Vec<f64>,
    pub time: f64,
}

impl PeakConfiguration {
    pub fn new(positions: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != masses.len() {
            return Err(Error::InvalidArgument(format!(
                "need matching nonempty positions and masses, got {} and {}",
                positions.len(),
                masses.len()
            )));
        }
        if masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("peak masses must be positive".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("peak positions must be finite".into()));
        }
        Ok(Self {
            lifted: positions,
            masses,
            time: 0.0,
        })
    }

    /// `n` equal peaks of total mass `mass` at `offset + j/n`.
    pub fn equidistant(n: usize, mass: f64, offset: f64) -> Result<Self> {
        let pos = (0..n).map(|j| offset + j as f64 / n as f64).collect();
        Self::new(pos, vec![mass / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Positions reduced to `[0, 1)`.
    pub fn positions(&self) -> Vec<f64> {
        self.lifted.iter().map(|&p| wrap(p)).collect()
    }

    /// Positions as continuous lifts of the initial values.
    pub fn lifted(&self) -> &[f64] {
        &self.lifted
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Circle distances `d(θ_j, θ_k)` for `j < k`, row by row.
    pub fn distances(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            for k in j + 1..self.len() {
                out.push(circle_distance(self.lifted[j], self.lifted[k]));
            }
        }
        out
    }

    /// Translate every peak by `a`.
    pub fn shifted(&self, a: f64) -> Self {
        Self {
            lifted: self.lifted.iter().map(|p| p + a).collect(),
            ..self.clone()
        }
    }

    /// Merge peaks within `tol` of each other (summing masses, position at
    /// the mass-weighted centre of the nearby lifts).
    pub fn merged(&self, tol: f64) -> Self {
        let mut lifted: Vec<f64> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        for (&p, &m) in self.lifted.iter().zip(&self.masses) {
            match lifted.iter().position(|&q| circle_distance(p, q) < tol) {
                Some(i) => {
                    // bring p onto the lift nearest q before averaging
                    let q = lifted[i];
                    let p = q + lift_centered(p - q);
                    lifted[i] = (q * masses[i] + p * m) / (masses[i] + m);
                    masses[i] += m;
                }
                None => {
                    lifted.push(p);
                    masses.push(m);
                }
            }
        }
        Self {
            lifted,
            masses,
            time: self.time,
        }
    }
}

fn rates(lifted: &[f64], masses: &[f64], kernel: &InteractionKernel) -> Vec<f64> {
    lifted
        .iter()
        .map(|&tj| {
            -lifted
                .iter()
                .zip(masses)
                .map(|(&tk, &mk)| mk * kernel.eval(lift_centered(tj - tk)))
                .sum::<f64>()
        })
        .collect()
}

/// `dθ_j/dt` for every peak.
pub fn peak_rhs(config: &PeakConfiguration, kernel: &InteractionKernel) -> Vec<f64> {
    rates(&config.lifted, &config.masses, kernel)
}

/// One classical RK4 step.
pub fn rk4_step(config: &PeakConfiguration, kernel: &InteractionKernel, dt: f64) -> PeakConfiguration {
    let m = &config.masses;
    let x = &config.lifted;
    let axpy = |a: f64, d: &[f64]| -> Vec<f64> { x.iter().zip(d).map(|(xi, di)| xi + a * di).collect() };
    let k1 = rates(x, m, kernel);
    let k2 = rates(&axpy(0.5 * dt, &k1), m, kernel);
    let k3 = rates(&axpy(0.5 * dt, &k2), m, kernel);
    let k4 = rates(&axpy(dt, &k3), m, kernel);
    let lifted = (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    PeakConfiguration {
        lifted,
        masses: config.masses.clone(),
        time: config.time + dt,
    }
}

/// `Ψ = Σ_{j,k} m_j m_k Φ(θ_j − θ_k)`.
pub fn potential_psi_peaks(config: &PeakConfiguration, kernel: &InteractionKernel) -> f64 {
    let mut psi = 0.0;
    for (&tj, &mj) in config.lifted.iter().zip(&config.masses) {
        for (&tk, &mk) in config.lifted.iter().zip(&config.masses) {
            psi += mj * mk * kernel.primitive(tj - tk);
        }
    }
    psi
}

/// `Σ m_j θ_j` with each position lifted into `[−1/2, 1/2)`.
///
/// Not a circle invariant: it jumps whenever a peak crosses `1/2`.
pub fn naive_first_moment(config: &PeakConfiguration) -> f64 {
    config
        .lifted
        .iter()
        .zip(&config.masses)
        .map(|(&p, &m)| m * lift_centered(p))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakSample {
    pub time: f64,
    /// Positions in `[0, 1)`.
    pub positions: Vec<f64>,
    pub lifted: Vec<f64>,
    pub masses: Vec<f64>,
    pub distances: Vec<f64>,
    pub psi: f64,
    pub naive_moment: f64,
}

impl PeakSample {
    fn of(config: &PeakConfiguration, kernel: &InteractionKernel) -> Self {
        Self {
            time: config.time,
            positions: config.positions(),
            lifted: config.lifted.clone(),
            masses: config.masses.clone(),
            distances: config.distances(),
            psi: potential_psi_peaks(config, kernel),
            naive_moment: naive_first_moment(config),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakTrajectory {
    pub samples: Vec<PeakSample>,
    pub last: PeakConfiguration,
}

/// Integrate to `t_end` with RK4 steps of (at most) `dt`.
///
/// Samples are recorded at the start, every `observe_every` time units and at
/// the end. With `merge` set, peaks closer than [`MERGE_DISTANCE`] are fused
/// after each step.
pub fn integrate(
    config: &PeakConfiguration,
    kernel: &InteractionKernel,
    dt: f64,
    t_end: f64,
    observe_every: Option<f64>,
    merge: bool,
) -> Result<PeakTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if let Some(e) = observe_every {
        if !(e > 0.0) {
            return Err(Error::InvalidArgument("observation interval must be positive".into()));
        }
    }
    let t0 = config.time;
    let span = (t_end - t0).max(0.0);
    let steps = (span / dt - 1e-9).ceil().max(0.0) as usize;
    let stride = observe_every.map(|e| ((e / dt).round() as usize).max(1));
    let mut cur = config.clone();
    let mut samples = vec![PeakSample::of(&cur, kernel)];
    for i in 1..=steps {
        let target = if i == steps { t_end } else { t0 + i as f64 * dt };
        let mut next = rk4_step(&cur, kernel, target - cur.time);
        next.time = target;
        if merge {
            next = next.merged(MERGE_DISTANCE);
        }
        cur = next;
        if i < steps && stride.is_some_and(|s| i % s == 0) {
            samples.push(PeakSample::of(&cur, kernel));
        }
    }
    if steps > 0 {
        samples.push(PeakSample::of(&cur, kernel));
    }
    Ok(PeakTrajectory { samples, last: cur })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine() -> InteractionKernel {
        InteractionKernel::from_modes(&[(1, 1.0)]).unwrap()
    }

    #[test]
    fn quarter_apart_rates() {
        let c = PeakConfiguration::new(vec![0.0, 0.25], vec![0.5, 0.5]).unwrap();
        let r = peak_rhs(&c, &sine());
        assert!((r[0] - 0.5).abs() < 1e-15);
        assert!((r[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn stationary_certificates() {
        let v = InteractionKernel::from_modes(&[(1, 1.0), (2, 2.0), (3, -0.3)]).unwrap();
        let one = PeakConfiguration::new(vec![0.3], vec![1.0]).unwrap();
        assert_eq!(peak_rhs(&one, &v), vec![0.0]);
        for n in 3..7 {
            let c = PeakConfiguration::equidistant(n, 1.0, 0.1).unwrap();
            assert!(peak_rhs(&c, &v).iter().all(|r| r.abs() < 1e-14));
        }
    }

    #[test]
    fn psi_values() {
        let c = PeakConfiguration::new(vec![0.2, 0.2, 0.2], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(potential_psi_peaks(&c, &sine()), 0.0);
        let c = PeakConfiguration::new(vec![0.0, 0.5], vec![0.5, 0.5]).unwrap();
        assert!((potential_psi_peaks(&c, &sine()) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn naive_moment_values() {
        let c = PeakConfiguration::new(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(naive_first_moment(&c), 0.0);
        let c = PeakConfiguration::new(vec![0.6, 0.2], vec![0.5, 0.5]).unwrap();
        assert!((naive_first_moment(&c) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn merging() {
        let c = PeakConfiguration::new(vec![0.9999999999999, 1e-13, 0.5], vec![0.25, 0.25, 0.5]).unwrap();
        let m = c.merged(MERGE_DISTANCE);
        assert_eq!(m.len(), 2);
        assert_eq!(m.masses(), &[0.5, 0.5]);
        assert!(circle_distance(m.positions()[0], 0.0) < 1e-12);
    }

    #[test]
    fn integrate_records_endpoints() {
        let c = PeakConfiguration::new(vec![0.0, 0.1], vec![0.5, 0.5]).unwrap();
        let t = integrate(&c, &sine(), 1e-3, 1.0, Some(0.25), false).unwrap();
        assert_eq!(t.samples.len(), 5);
        assert!((t.last.time - 1.0).abs() < 1e-15);
        assert_eq!(t.last.masses(), c.masses());
        assert!(integrate(&c, &sine(), 0.0, 1.0, None, false).is_err());
    }
}
