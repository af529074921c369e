use tde_core::peaks::{self, PeakConfiguration};
use tde_core::InteractionKernel;

fn k(pairs: &[(usize, f64)]) -> InteractionKernel {
    InteractionKernel::from_modes(pairs).unwrap()
}

/// Fine RK4 on `x' = −V(x)`.
fn reference_distance(v: &InteractionKernel, x0: f64, t: f64) -> f64 {
    let dt = 1e-4;
    let mut x = x0;
    for _ in 0..(t / dt).round() as usize {
        let f = |y: f64| -v.eval(y);
        let k1 = f(x);
        let k2 = f(x + 0.5 * dt * k1);
        let k3 = f(x + 0.5 * dt * k2);
        let k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x
}

#[test]
fn two_peak_difference_follows_scalar_ode() {
    let v = k(&[(1, 1.0), (2, 2.0)]);
    for x0 in [0.1, 0.35] {
        let c = PeakConfiguration::new(vec![x0, 0.0], vec![0.3, 0.7]).unwrap();
        let out = peaks::integrate(&c, &v, 1e-3, 2.0, None, false).unwrap();
        let l = out.last.lifted();
        assert!((l[0] - l[1] - reference_distance(&v, x0, 2.0)).abs() < 1e-8);
    }
}

#[test]
fn psi_decreases_along_example_runs() {
    let v = k(&[(1, 1.0), (2, 2.0)]);
    for d0 in [0.15, 0.4] {
        let c = PeakConfiguration::new(vec![0.0, d0], vec![0.5, 0.5]).unwrap();
        let out = peaks::integrate(&c, &v, 1e-3, 50.0, Some(0.1), false).unwrap();
        for w in out.samples.windows(2) {
            assert!(w[1].psi <= w[0].psi + 1e-10);
        }
        assert_eq!(out.last.masses(), c.masses());
    }
}

#[test]
fn stationary_configurations() {
    let v = k(&[(1, 1.0), (2, -1.0)]);
    // V(1/6) = 0
    let c = PeakConfiguration::new(vec![0.1, 0.1 + 1.0 / 6.0], vec![0.8, 0.2]).unwrap();
    assert!(peaks::peak_rhs(&c, &v).iter().all(|r| r.abs() < 1e-15));
    for n in 3..8 {
        let c = PeakConfiguration::equidistant(n, 1.0, 0.37).unwrap();
        assert!(peaks::peak_rhs(&c, &v).iter().all(|r| r.abs() < 1e-14));
    }
}

#[test]
fn translation_equivariance() {
    let v = k(&[(1, 1.0), (2, 0.5), (4, -0.2)]);
    let c = PeakConfiguration::new(vec![0.05, 0.3, 0.62], vec![0.2, 0.5, 0.3]).unwrap();
    let a = 0.25;
    let base = peaks::integrate(&c, &v, 1e-3, 3.0, None, false).unwrap();
    let moved = peaks::integrate(&c.shifted(a), &v, 1e-3, 3.0, None, false).unwrap();
    for (x, y) in base.last.lifted().iter().zip(moved.last.lifted()) {
        assert!((y - x - a).abs() < 1e-12);
    }
}

#[test]
fn merging_on_request() {
    let v = k(&[(1, 1.0), (2, 2.0)]);
    let c = PeakConfiguration::new(vec![0.0, 0.15, 0.6], vec![0.4, 0.4, 0.2]).unwrap();
    let kept = peaks::integrate(&c, &v, 1e-3, 10.0, None, false).unwrap();
    assert_eq!(kept.last.len(), 3);
    let merged = peaks::integrate(&c, &v, 1e-3, 10.0, None, true).unwrap();
    assert!(merged.last.len() < 3);
    assert!((merged.last.total_mass() - 1.0).abs() < 1e-15);
}
