use std::f64::consts::PI;

use num_complex::Complex64;
use tde_core::measures::{
    find_extrema, lift_centered, local_barycenter, local_mass, potential_psi_grid, ExtremumKind,
};
use tde_core::rng::SplitMix64;
use tde_core::spectral::{self, SolverConfig, SpectralState};
use tde_core::{fourier, CircleInterval, GridFunction, InteractionKernel};

fn gaussian_bump(n: usize, centre: f64, width: f64) -> GridFunction {
    let g = GridFunction::from_fn(n, |t| {
        let s = lift_centered(t - centre);
        (-s * s / (2.0 * width * width)).exp()
    })
    .unwrap();
    let m = g.mass();
    GridFunction::new(g.values().iter().map(|v| v / m).collect()).unwrap()
}

/// Midpoint rule on the band-limited interpolant over `[a, b]`.
fn fine_quadrature(f: &GridFunction, a: f64, b: f64, weight: impl Fn(f64) -> f64) -> f64 {
    let spec = fourier::analyze(f.values());
    let n = 20_000;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|j| {
            let x = a + (j as f64 + 0.5) * h;
            fourier::eval_spectrum(&spec, f.len(), x, 0) * weight(x)
        })
        .sum::<f64>()
        * h
}

#[test]
fn psi_parseval_matches_double_quadrature() {
    let mut rng = SplitMix64::new(17);
    for _ in 0..5 {
        let v = InteractionKernel::from_modes(
            &(1..=4).map(|l| (l, 2.0 * rng.next_f64() - 1.0)).collect::<Vec<_>>(),
        )
        .unwrap();
        let modes: Vec<Complex64> = (0..6)
            .map(|_| Complex64::new(0.1 * (rng.next_f64() - 0.5), 0.1 * (rng.next_f64() - 0.5)))
            .collect();
        let n = 64;
        let f = GridFunction::new(fourier::synthesize(1.0, &modes, n)).unwrap();
        let mut direct = 0.0;
        for i in 0..n {
            for j in 0..n {
                direct += v.primitive(f.theta(i) - f.theta(j)) * f.values()[i] * f.values()[j];
            }
        }
        direct /= (n * n) as f64;
        assert!((potential_psi_grid(&f, &v) - direct).abs() < 1e-8);
        let s = SpectralState::new(1.0, modes);
        assert!((spectral::potential_psi(&s, &v) - direct).abs() < 1e-8);
    }
}

#[test]
fn psi_of_constant() {
    let v = InteractionKernel::from_modes(&[(1, 1.0), (2, 2.0)]).unwrap();
    let f = GridFunction::constant(32, 2.0).unwrap();
    let want = 4.0 * (1.0 / (2.0 * PI) + 2.0 / (4.0 * PI));
    assert!((potential_psi_grid(&f, &v) - want).abs() < 1e-14);
}

#[test]
fn narrow_bump_mass_inside_interval() {
    let f = gaussian_bump(512, 0.3, 0.01);
    let i = CircleInterval::new(0.2, 0.4).unwrap();
    let oracle = fine_quadrature(&f, 0.2, 0.4, |_| 1.0);
    assert!((local_mass(&f, &i) - oracle).abs() < 1e-6);
    assert!((local_mass(&f, &i) - 1.0).abs() < 1e-6);
}

#[test]
fn barycenter_across_wrap_point() {
    let c = -0.05;
    let f = gaussian_bump(512, c, 0.02);
    let i = CircleInterval::new(-0.3, 0.2).unwrap();
    let m = fine_quadrature(&f, -0.3, 0.2, |_| 1.0);
    let first = fine_quadrature(&f, -0.3, 0.2, |x| x);
    let oracle = (first / m).rem_euclid(1.0);
    let got = local_barycenter(&f, &i).unwrap();
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    assert!((got - 0.95).abs() < 1e-9);
    let again = local_barycenter(&f, &i.shifted(1)).unwrap();
    assert!((again - got).abs() < 1e-14);
}

#[test]
fn almost_full_circle_mass() {
    let f = GridFunction::from_fn(128, |t| 1.3 + 0.4 * (2.0 * PI * t).sin() + 0.1 * (6.0 * PI * t).cos()).unwrap();
    let gap = 1e-13;
    let i = CircleInterval::new(0.123, 1.123 - gap).unwrap();
    assert!((local_mass(&f, &i) - 1.3).abs() < 1e-12);
}

#[test]
fn extrema_of_raised_cosine() {
    let f = GridFunction::from_fn(128, |t| 1.0 + (2.0 * PI * t).cos()).unwrap();
    let e = find_extrema(&f);
    assert_eq!(e.len(), 2);
    let max = e.iter().find(|x| x.kind == ExtremumKind::Max).unwrap();
    let min = e.iter().find(|x| x.kind == ExtremumKind::Min).unwrap();
    assert!(tde_core::measures::circle_distance(max.position, 0.0) < 1e-10);
    assert!((max.value - 2.0).abs() < 1e-12);
    assert!((min.position - 0.5).abs() < 1e-10);
    assert!(min.value.abs() < 1e-12);
}

#[test]
fn isolated_bumps_keep_local_mass_and_barycentre() {
    // both bumps contract under sin(4πθ); flux through the arc ends is negligible
    let v = InteractionKernel::from_modes(&[(2, 1.0)]).unwrap();
    let n = 512;
    let a = gaussian_bump(n, 0.0, 0.04);
    let b = gaussian_bump(n, 0.5, 0.04);
    let f = GridFunction::new(a.values().iter().zip(b.values()).map(|(x, y)| 0.7 * x + 0.3 * y).collect()).unwrap();
    let s = spectral::from_grid(&f, 96);
    let i = CircleInterval::new(-0.25, 0.25).unwrap();
    let cfg = SolverConfig { initial_modes: 96, max_modes: 1024, ..SolverConfig::default() };
    let mut series = Vec::new();
    spectral::run(&s, &v, 0.0, &cfg, 0.1, Some(0.025), |st| {
        let g = spectral::to_grid(st, 4 * st.num_modes());
        series.push((st.time, local_mass(&g, &i), lift_centered(local_barycenter(&g, &i).unwrap())));
    })
    .unwrap();
    let (t0, m0, c0) = series[0];
    for &(t, m, c) in &series[1..] {
        let dt = t - t0;
        assert!((m - m0).abs() < 1e-6 * dt, "mass drift {} at t = {t}", m - m0);
        assert!((c - c0).abs() < 1e-6 * dt, "barycentre drift {} at t = {t}", c - c0);
    }
}
