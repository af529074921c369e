use std::f64::consts::PI;

use tde_core::measures::{find_extrema, maxima_by_height};
use tde_core::spectral::{self, SolverConfig};
use tde_core::stationary::{
    check_shape_estimates, default_initial_guess, iterate_once, solve, stationary_residual,
    IterationProblem, IterationStatus,
};
use tde_core::{Error, GridFunction, InteractionKernel};

fn k(pairs: &[(usize, f64)]) -> InteractionKernel {
    InteractionKernel::from_modes(pairs).unwrap()
}

fn bessel_i(nu: u32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(nu as i32) / (1..=nu).map(|i| i as f64).product::<f64>();
    let mut sum = term;
    for m in 1..200 {
        term *= (x / 2.0).powi(2) / (m as f64 * (m + nu) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

#[test]
fn single_sine_profile_matches_bessel_fixed_point() {
    let d = 0.05;
    let kappa = 1.0 / (2.0 * PI * d);
    // s = I1(κs)/I0(κs), nontrivial root by bisection
    let g = |s: f64| bessel_i(1, kappa * s) / bessel_i(0, kappa * s) - s;
    let (mut a, mut b) = (1e-3, 1.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let s = 0.5 * (a + b);
    let v = k(&[(1, 1.0)]);
    let p = IterationProblem::new(v.clone(), d, 256);
    let out = solve(&p, &default_initial_guess(&p).unwrap()).unwrap();
    assert_eq!(out.status, IterationStatus::Converged);
    let z = bessel_i(0, kappa * s);
    for (j, &f) in out.profile.values().iter().enumerate() {
        let t = j as f64 / 256.0;
        let want = (kappa * s * (2.0 * PI * t).cos()).exp() / z;
        assert!((f - want).abs() < 1e-8, "θ = {t}: {f} vs {want}");
    }
    assert!(out.residual <= 1e-9);
    assert!(check_shape_estimates(&out.profile, &v, d).all_passed());
}

#[test]
fn bump_maps_to_closed_form() {
    let d = 0.1;
    let v = k(&[(1, 1.0)]);
    let p = IterationProblem::new(v.clone(), d, 512);
    // V∗δ = V: a narrow bump gives exp(−Φ/D) up to the bump's width
    let w = 2e-3f64;
    let bump = GridFunction::from_fn(512, |t| {
        let s = tde_core::measures::lift_centered(t);
        (-s * s / (2.0 * w * w)).exp()
    })
    .unwrap();
    let m = bump.mass();
    let bump = GridFunction::new(bump.values().iter().map(|x| x / m).collect()).unwrap();
    let next = iterate_once(&bump, &p).unwrap();
    let damp = (-2.0 * PI * PI * w * w).exp();
    let raw: Vec<f64> = (0..512)
        .map(|j| (-(damp * (1.0 - (2.0 * PI * j as f64 / 512.0).cos()) / (2.0 * PI)) / d).exp())
        .collect();
    let z = raw.iter().sum::<f64>() / 512.0;
    for (a, b) in next.values().iter().zip(&raw) {
        assert!((a - b / z).abs() < 1e-8);
    }
    assert!((next.mass() - 1.0).abs() < 1e-12);
    assert!(next.min() > 0.0);
}

#[test]
fn residual_of_non_stationary_profile() {
    let v = k(&[(1, 1.0)]);
    let d = 0.1;
    let f = GridFunction::from_fn(128, |t| 1.0 + 0.5 * (2.0 * PI * t).cos()).unwrap();
    // f' = −π sin, V∗f = (1/4) sin
    let oracle = (0..128)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / 128.0;
            (d * (-PI * t.sin()) + 0.25 * t.sin() * (1.0 + 0.5 * t.cos())).abs()
        })
        .fold(0.0f64, f64::max);
    let r = stationary_residual(&f, &v, d);
    assert!(r > 0.1);
    assert!((r - oracle).abs() < 1e-12);
}

#[test]
fn sign_changing_kernel_cycles() {
    let mut p = IterationProblem::new(k(&[(1, 1.0), (2, -1.0)]), 0.01, 512);
    p.max_iters = 20_000;
    let f0 = GridFunction::from_fn(512, |t| 1.0 + 0.3 * (2.0 * PI * t).cos() + 0.1 * (4.0 * PI * t).sin()).unwrap();
    let out = solve(&p, &f0).unwrap();
    assert_eq!(out.status, IterationStatus::TwoCycle);
    assert!(out.last_change > 10.0 * p.tol);
}

#[test]
fn forced_half_period_converges() {
    let v = k(&[(2, 1.0), (1, -3.0)]);
    let mut p = IterationProblem::new(v.clone(), 0.02, 256);
    p.forced_period = 2;
    let out = solve(&p, &default_initial_guess(&p).unwrap()).unwrap();
    assert_eq!(out.status, IterationStatus::Converged);
    let f = out.profile.values();
    for j in 0..128 {
        assert!((f[j] - f[j + 128]).abs() < 1e-8);
    }
    assert!(out.residual < 1e-6, "residual {}", out.residual);
    assert_eq!(maxima_by_height(&find_extrema(&out.profile)).len(), 2);
}

#[test]
fn half_periodic_kernel_gives_half_periodic_profile() {
    let v = k(&[(2, 1.0), (4, 0.3)]);
    let p = IterationProblem::new(v, 0.02, 256);
    let f0 = GridFunction::from_fn(256, |t| 1.0 + 0.2 * (4.0 * PI * t).cos()).unwrap();
    let out = solve(&p, &f0).unwrap();
    assert_eq!(out.status, IterationStatus::Converged);
    let f = out.profile.values();
    for j in 0..128 {
        assert!((f[j] - f[j + 128]).abs() < 1e-8);
    }
}

#[test]
fn even_initial_data_stays_even() {
    let v = k(&[(1, 1.0), (2, 0.5)]);
    let p = IterationProblem::new(v, 0.05, 256);
    let mut f = GridFunction::from_fn(256, |t| 1.0 + 0.4 * (2.0 * PI * t).cos() + 0.1 * (4.0 * PI * t).cos()).unwrap();
    for _ in 0..20 {
        f = iterate_once(&f, &p).unwrap();
        for j in 1..128 {
            assert!((f.values()[j] - f.values()[256 - j]).abs() < 1e-10);
        }
        assert!((f.mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn converged_profile_is_a_fixed_point_of_the_dynamics() {
    let v = k(&[(1, 1.0)]);
    let d = 0.05;
    let p = IterationProblem::new(v.clone(), d, 256);
    let out = solve(&p, &default_initial_guess(&p).unwrap()).unwrap();
    let s = spectral::from_grid(&out.profile, 100);
    let cfg = SolverConfig { initial_modes: 100, ..SolverConfig::default() };
    let end = spectral::run(&s, &v, d, &cfg, 1.0, None, |_| {}).unwrap().state;
    let g = spectral::to_grid(&end, 256);
    assert!(g.sup_distance(&out.profile) < 1e-4);
}

#[test]
fn centred_start_passes_through_one_large_one_small_peak() {
    let d = 0.03;
    let p0 = IterationProblem::new(k(&[(1, 1.0)]), d, 512);
    let centred = solve(&p0, &default_initial_guess(&p0).unwrap()).unwrap().profile;
    let v = k(&[(2, 1.0), (3, 0.5)]);
    let p = IterationProblem::new(v.clone(), d, 512);
    let fixed = solve(&p, &centred).unwrap();
    assert_eq!(fixed.status, IterationStatus::Converged);
    let m = maxima_by_height(&find_extrema(&fixed.profile));
    assert_eq!(m.len(), 2);
    assert!((m[0].value - m[1].value).abs() < 1e-8);
    // the time-dependent problem lingers near a one-peak-like state first
    let s = spectral::from_grid(&centred, 64);
    let cfg = SolverConfig { initial_modes: 64, ..SolverConfig::default() };
    let end = spectral::run(&s, &v, d, &cfg, 10.0, None, |_| {}).unwrap().state;
    let m = maxima_by_height(&find_extrema(&spectral::to_grid(&end, 512)));
    assert_eq!(m.len(), 2);
    assert!(m[1].value < 0.5 * m[0].value);
    assert!((tde_core::measures::circle_distance(m[0].position, m[1].position) - 0.5).abs() < 1e-9);
}

#[test]
fn too_sharp_reports_overflow() {
    let p = IterationProblem::new(k(&[(1, 1.0)]), 5e-5, 256);
    let f = GridFunction::from_fn(256, |t| 1.0 + 0.5 * (2.0 * PI * t).cos()).unwrap();
    assert!(matches!(iterate_once(&f, &p), Err(Error::Overflow { .. })));
}
