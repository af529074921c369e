//! Densities sampled on the circle and diagnostics computed from them:
//! local masses and barycenters on arcs, the interaction potential, and
//! extremum detection.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier;
use crate::kernel::InteractionKernel;

/// Real density sampled on the uniform grid `θ_j = j/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid function needs at least one point".into()));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid value {j} is not finite")));
        }
        Ok(Self { values })
    }

    /// Sample `f` at `θ_j = j/n`.
    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        Self::new((0..n).map(|j| f(j as f64 / n as f64)).collect())
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 / self.len() as f64
    }

    /// Value at integer node index (wrapped).
    pub fn at(&self, j: i64) -> f64 {
        self.values[j.rem_euclid(self.len() as i64) as usize]
    }

    /// Total mass by the periodic trapezoid rule (exact for band-limited f).
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |f − g|` over the grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.len(), other.len(), "grid sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Band-limited interpolant at an arbitrary point.
    pub fn interpolate(&self, theta: f64) -> f64 {
        fourier::interpolate(&self.values, theta)
    }

    /// Spectral derivative of the given order.
    pub fn derivative(&self, order: u32) -> GridFunction {
        GridFunction {
            values: fourier::derivative(&self.values, order),
        }
    }

    /// `(V∗f)(θ_j) = ∫ V(θ_j − ψ) f(ψ) dψ`, computed from the sine series:
    /// `(V∗f)_k = −2i v_k f_k`, so only modes up to `L` contribute.
    pub fn convolve(&self, kernel: &InteractionKernel) -> GridFunction {
        let n = self.len();
        let coeffs = fourier::coefficients(&self.values, kernel.max_mode());
        let mut out = vec![0.0; n];
        for (l, a) in kernel.modes() {
            if l >= coeffs.len() {
                break;
            }
            // V_l = −i a_l/2; term 2 Re(V_l f_l e^{2πilθ})
            let fl = coeffs[l];
            let w = 2.0 * PI * l as f64;
            for (j, o) in out.iter_mut().enumerate() {
                let t = w * j as f64 / n as f64;
                // Re(−i a/2 · f · e^{it}) · 2 = a (Re f sin t + Im f cos t)
                *o += a * (fl.re * t.sin() + fl.im * t.cos());
            }
        }
        GridFunction { values: out }
    }
}

/// Closed arc `p([a, b])` on the circle, `0 < b − a < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleInterval {
    lo: f64,
    hi: f64,
}

impl CircleInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let len = hi - lo;
        if !(len > 0.0 && len < 1.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "arc [{lo}, {hi}] must have length strictly between 0 and 1"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Arc of half-width `h` around `centre`.
    pub fn centred(centre: f64, h: f64) -> Result<Self> {
        Self::new(centre - h, centre + h)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// The closing arc `[b, a + 1]`.
    pub fn complement(&self) -> CircleInterval {
        CircleInterval {
            lo: self.hi,
            hi: self.lo + 1.0,
        }
    }

    /// Shift the lift by an integer.
    pub fn shifted(&self, k: i64) -> CircleInterval {
        CircleInterval {
            lo: self.lo + k as f64,
            hi: self.hi + k as f64,
        }
    }

    /// Representative of `theta` in `[a, a + 1)`.
    pub fn lift(&self, theta: f64) -> f64 {
        self.lo + (theta - self.lo).rem_euclid(1.0)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.lift(theta) <= self.hi
    }
}

/// Reduce to `[0, 1)`.
pub fn wrap(theta: f64) -> f64 {
    let r = theta.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Circle distance `min_k |a − b + k|`, in `[0, 1/2]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Lift into `[−1/2, 1/2)`.
pub fn lift_centered(theta: f64) -> f64 {
    let r = (theta + 0.5).rem_euclid(1.0) - 0.5;
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Zeroth, first and second moments of the piecewise-linear interpolant over
/// `[a, b]`, the latter two about `centre`.
fn arc_moments(f: &GridFunction, a: f64, b: f64, centre: f64) -> (f64, f64, f64) {
    let n = f.len() as f64;
    let h = 1.0 / n;
    let first_cell = (a * n).floor() as i64;
    let last_cell = (b * n).ceil() as i64 - 1;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for j in first_cell..=last_cell {
        let xj = j as f64 * h;
        let ys = (a - xj).max(0.0);
        let ye = (b - xj).min(h);
        if ye <= ys {
            continue;
        }
        let g0 = f.at(j);
        let slope = (f.at(j + 1) - g0) / h;
        // ∫ y^p (g0 + slope·y) dy over [ys, ye]
        let p = |k: i32| (ye.powi(k) - ys.powi(k)) / k as f64;
        let c0 = g0 * p(1) + slope * p(2);
        let c1 = g0 * p(2) + slope * p(3);
        let c2 = g0 * p(3) + slope * p(4);
        let off = xj - centre;
        m0 += c0;
        m1 += off * c0 + c1;
        m2 += off * off * c0 + 2.0 * off * c1 + c2;
    }
    (m0, m1, m2)
}

/// Local mass `∫_a^b p*(f)`.
pub fn local_mass(f: &GridFunction, interval: &CircleInterval) -> f64 {
    arc_moments(f, interval.lo, interval.hi, interval.lo).0
}

/// Local barycenter `p((1/m) ∫_a^b x p*(f)(x) dx)`, in `[0, 1)`.
pub fn local_barycenter(f: &GridFunction, interval: &CircleInterval) -> Result<f64> {
    // moments about the lower end keep the arithmetic small for large lifts
    let (m0, m1, _) = arc_moments(f, interval.lo, interval.hi, interval.lo);
    if m0 <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(wrap(interval.lo + m1 / m0))
}

/// `∫_I (θ − centre)² f(θ) dθ` on the lift of `I` containing `centre`.
pub fn local_second_moment(f: &GridFunction, interval: &CircleInterval, centre: f64) -> Result<f64> {
    if !interval.contains(centre) {
        return Err(Error::InvalidArgument(format!(
            "centre {centre} is not inside [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    let c = interval.lift(centre);
    Ok(arc_moments(f, interval.lo, interval.hi, c).2)
}

/// Interaction potential `Ψ = ∫∫ Φ(θ − ψ) f(ψ) f(θ)` via Parseval:
/// `Ψ = Φ̄ f_0² − Σ_l a_l |f_l|² / (2πl)`.
pub fn potential_psi_grid(f: &GridFunction, kernel: &InteractionKernel) -> f64 {
    let coeffs = fourier::coefficients(f.values(), kernel.max_mode());
    let mass = coeffs[0].re;
    let mut psi = kernel.primitive_mean() * mass * mass;
    for (l, a) in kernel.modes() {
        if l >= coeffs.len() {
            break;
        }
        psi -= a * coeffs[l].norm_sqr() / (2.0 * PI * l as f64);
    }
    psi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

impl ExtremumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub position: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    pub prominence: f64,
}

/// Relative prominence below which extrema count as synthesis ripple.
pub const PROMINENCE_FLOOR: f64 = 1e-6;

/// Strict local extrema of the band-limited interpolant, sorted by position.
///
/// Candidates come from sign changes of the spectral derivative between
/// neighbouring nodes and are refined with a Newton step on `f'`. Extrema
/// whose prominence is below `PROMINENCE_FLOOR · max f` are removed together
/// with the neighbour that defines their prominence.
pub fn find_extrema(f: &GridFunction) -> Vec<Extremum> {
    let n = f.len();
    if n < 3 {
        return Vec::new();
    }
    let spec = fourier::analyze(f.values());
    let d1 = fourier::derivative(f.values(), 1);
    let h = 1.0 / n as f64;
    let mut found = Vec::new();
    for j in 0..n {
        let (a, b) = (d1[j], d1[(j + 1) % n]);
        let kind = if a > 0.0 && b <= 0.0 {
            ExtremumKind::Max
        } else if a < 0.0 && b >= 0.0 {
            ExtremumKind::Min
        } else {
            continue;
        };
        let mut t = j as f64 * h + h * a / (a - b);
        let slope = fourier::eval_spectrum(&spec, n, t, 1);
        let curv = fourier::eval_spectrum(&spec, n, t, 2);
        if curv != 0.0 {
            let step = slope / curv;
            if step.abs() < h {
                t -= step;
            }
        }
        let t = wrap(t);
        found.push(Extremum {
            position: t,
            value: fourier::eval_spectrum(&spec, n, t, 0),
            kind,
            prominence: 0.0,
        });
    }
    found.sort_by(|x, y| x.position.total_cmp(&y.position));
    let floor = PROMINENCE_FLOOR * f.max().abs();
    prune_by_prominence(found, floor)
}

fn assign_prominence(ext: &mut [Extremum]) {
    let m = ext.len();
    for i in 0..m {
        let prev = ext[(i + m - 1) % m].value;
        let next = ext[(i + 1) % m].value;
        let v = ext[i].value;
        ext[i].prominence = match ext[i].kind {
            ExtremumKind::Max => v - prev.max(next),
            ExtremumKind::Min => prev.min(next) - v,
        };
    }
}

fn prune_by_prominence(mut ext: Vec<Extremum>, floor: f64) -> Vec<Extremum> {
    loop {
        if ext.len() < 2 {
            return Vec::new();
        }
        assign_prominence(&mut ext);
        let (i, weakest) = ext
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.prominence.total_cmp(&b.1.prominence))
            .map(|(i, e)| (i, *e))
            .unwrap();
        if weakest.prominence >= floor {
            return ext;
        }
        if ext.len() == 2 {
            return Vec::new();
        }
        let m = ext.len();
        let prev = (i + m - 1) % m;
        let next = (i + 1) % m;
        // drop the neighbour that pins the prominence
        let partner = match weakest.kind {
            ExtremumKind::Max => {
                if ext[prev].value >= ext[next].value {
                    prev
                } else {
                    next
                }
            }
            ExtremumKind::Min => {
                if ext[prev].value <= ext[next].value {
                    prev
                } else {
                    next
                }
            }
        };
        let (hi, lo) = if i > partner { (i, partner) } else { (partner, i) };
        ext.remove(hi);
        ext.remove(lo);
    }
}

/// Maxima sorted by height, highest first.
pub fn maxima_by_height(ext: &[Extremum]) -> Vec<Extremum> {
    let mut m: Vec<Extremum> = ext
        .iter()
        .filter(|e| e.kind == ExtremumKind::Max)
        .copied()
        .collect();
    m.sort_by(|a, b| b.value.total_cmp(&a.value));
    m
}
