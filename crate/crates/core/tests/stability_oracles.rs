use std::f64::consts::PI;

use num_complex::Complex64;
use tde_core::peaks::{self, PeakConfiguration};
use tde_core::spectral::{self, SolverConfig, SpectralState};
use tde_core::stability::{
    constant_state_report, equidistant_eigenvalues, pattern_conditions, peak_linearization,
    stability_verdict,
};
use tde_core::InteractionKernel;

fn k(pairs: &[(usize, f64)]) -> InteractionKernel {
    InteractionKernel::from_modes(pairs).unwrap()
}

fn first_mode_after(d: f64, t: f64) -> f64 {
    let v = k(&[(1, 1.0)]);
    let mut s = SpectralState::constant(1.0, 8);
    s.modes[0] = Complex64::new(0.05, 0.0);
    let cfg = SolverConfig { initial_modes: 8, ..SolverConfig::default() };
    spectral::run(&s, &v, d, &cfg, t, None, |_| {}).unwrap().state.coeff(1).norm()
}

#[test]
fn global_stability_threshold_matches_dynamics() {
    let v = k(&[(1, 1.0)]);
    let dc = 1.0 / (4.0 * PI);
    let above = constant_state_report(&v, 1.05 * dc, 1.0, 4);
    let below = constant_state_report(&v, 0.95 * dc, 1.0, 4);
    assert!(above.globally_stable && !below.globally_stable);
    assert!(first_mode_after(1.3 * dc, 20.0) < 1e-6 * 0.05);
    assert!(first_mode_after(0.95 * dc, 20.0) > 0.05);
}

#[test]
fn third_mode_window() {
    let v = k(&[(3, 1.0), (1, -4.0)]);
    let dc = 1.0 / (12.0 * PI);
    assert_eq!(constant_state_report(&v, 0.8 * dc, 1.0, 8).unstable_modes(), vec![3]);
    assert!(constant_state_report(&v, 1.2 * dc, 1.0, 8).unstable_modes().is_empty());
}

#[test]
fn eigen_sweep_sign_flips() {
    for gamma in [0.5, 2.0, 4.0] {
        let v = k(&[(1, 1.0), (2, gamma)]);
        let d1 = 1.0 / (4.0 * PI);
        let d2 = gamma / (8.0 * PI);
        let r1 = constant_state_report(&v, d1, 1.0, 2);
        let r2 = constant_state_report(&v, d2, 1.0, 2);
        assert!(r1.eigenvalues[0].abs() < 1e-12);
        assert!(r2.eigenvalues[1].abs() < 1e-12);
        assert!(constant_state_report(&v, d1 * (1.0 - 1e-9), 1.0, 2).eigenvalues[0] > 0.0);
        assert!(constant_state_report(&v, d2 * (1.0 + 1e-9), 1.0, 2).eigenvalues[1] < 0.0);
    }
}

#[test]
fn basin_radii() {
    let v = k(&[(1, 0.2), (2, 0.3)]);
    let r = constant_state_report(&v, 0.1, 1.0, 4);
    let worst = r.eigenvalues.iter().map(|c| -c).fold(f64::INFINITY, f64::min);
    assert!((r.basin_radius.unwrap() - worst / (4.0 * PI * r.rho)).abs() < 1e-15);
    assert!((r.basin_sup_norm.unwrap() - worst / (2.0 * 2f64.sqrt() * PI * r.rho)).abs() < 1e-15);
    let single = constant_state_report(&k(&[(1, 0.2)]), 0.1, 1.0, 4);
    assert_eq!(single.basin_radius, Some(f64::INFINITY));
}

#[test]
fn pattern_scans() {
    assert!(pattern_conditions(&k(&[(1, 1.0)]), 1).unwrap().holds);
    let neg = pattern_conditions(&k(&[(1, 1.0), (2, -1.0)]), 1).unwrap();
    assert!(!neg.holds);
    assert!((neg.v_prime_zero - (2.0 * PI - 4.0 * PI)).abs() < 1e-12);
    let p = pattern_conditions(&k(&[(2, 1.0), (3, 0.5)]), 2).unwrap();
    assert!(p.sign_pattern && p.v_prime_zero > 0.0 && p.v_prime_half > 0.0);
    // sin(4πθ) alone: zero at 1/4, (*) holds with equality by symmetry
    let q = pattern_conditions(&k(&[(2, 1.0)]), 2).unwrap();
    assert!((q.zero.unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(q.star, Some(true));
}

#[test]
fn two_opposite_sine_peaks_unstable() {
    let lin = peak_linearization(&k(&[(1, 1.0)]), &[0.0, 0.5], &[0.5, 0.5]).unwrap();
    assert!((lin.eigenvalues[1] - 2.0 * PI).abs() < 1e-12);
    for j in 0..2 {
        assert!((lin.matrix.row(j).sum()).abs() < 1e-15);
    }
}

#[test]
fn unequal_masses_have_zero_mode() {
    let v = k(&[(1, 1.0), (2, 0.4), (3, -0.2)]);
    let lin = peak_linearization(&v, &[0.0, 0.21, 0.55, 0.8], &[0.1, 0.4, 0.3, 0.2]).unwrap();
    assert!(lin.eigenvalues.iter().any(|l| l.abs() < 1e-12));
    let ones = nalgebra::DVector::from_element(4, 1.0);
    assert!((&lin.matrix * ones).norm() < 1e-14);
    // real spectrum: compare with the general solver
    let mut general: Vec<f64> = lin.matrix.complex_eigenvalues().iter().map(|c| {
        assert!(c.im.abs() < 1e-10);
        c.re
    }).collect();
    general.sort_by(f64::total_cmp);
    for (a, b) in general.iter().zip(&lin.eigenvalues) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn finite_difference_jacobian_matches_matrix() {
    let v = k(&[(1, 1.0), (2, 2.0), (3, 0.3)]);
    for n in 2..6 {
        let c = PeakConfiguration::equidistant(n, 1.0, 0.13).unwrap();
        let lin = peak_linearization(&v, &c.positions(), c.masses()).unwrap();
        let h = 1e-6;
        for col in 0..n {
            let mut plus = c.lifted().to_vec();
            let mut minus = c.lifted().to_vec();
            plus[col] += h;
            minus[col] -= h;
            let rp = peaks::peak_rhs(&PeakConfiguration::new(plus, c.masses().to_vec()).unwrap(), &v);
            let rm = peaks::peak_rhs(&PeakConfiguration::new(minus, c.masses().to_vec()).unwrap(), &v);
            for row in 0..n {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                assert!((fd - lin.matrix[(row, col)]).abs() < 1e-6, "n {n} ({row},{col})");
            }
        }
    }
}

#[test]
fn peak_dynamics_rate_matches_eigenvalue() {
    let v = k(&[(1, 1.0), (3, 0.2)]);
    let n = 3;
    let lam = equidistant_eigenvalues(&v, n);
    let top = lam[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let base = PeakConfiguration::equidistant(n, 1.0, 0.0).unwrap();
    let dev = [1e-6, -2e-6, 1e-6];
    let pos: Vec<f64> = base.lifted().iter().zip(dev).map(|(p, d)| p + d).collect();
    let c = PeakConfiguration::new(pos, base.masses().to_vec()).unwrap();
    let spread = |l: &[f64]| {
        let mean = (0..n).map(|j| l[j] - j as f64 / n as f64).sum::<f64>() / n as f64;
        (0..n).map(|j| (l[j] - j as f64 / n as f64 - mean).powi(2)).sum::<f64>().sqrt()
    };
    let t = 0.3;
    let out = peaks::integrate(&c, &v, 1e-3, t, None, false).unwrap();
    let rate = (spread(out.last.lifted()) / spread(c.lifted())).ln() / t;
    assert!((rate - top).abs() < 0.05 * top.abs(), "rate {rate} vs {top}");
}

#[test]
fn verdicts_for_named_kernels() {
    assert!(stability_verdict(&k(&[(1, 1.0)]), 1).unwrap().stable);
    let two = stability_verdict(&k(&[(1, 1.0), (2, 2.0)]), 2).unwrap();
    assert!(two.stable);
    assert!((k(&[(1, 1.0), (2, 2.0)]).eval_prime(0.5) - 6.0 * PI).abs() < 1e-12);
    let alpha = InteractionKernel::phase_modulated(1.2, 128);
    let four = stability_verdict(&alpha, 4).unwrap();
    assert!(alpha.eval_prime(0.25) < 0.0);
    assert!(!four.sufficient);
    for n in 2..=3 {
        for pairs in [vec![(1, 1.0), (2, 2.0)], vec![(1, 1.0), (2, -1.0)], vec![(3, 1.0), (1, -4.0)]] {
            let vd = stability_verdict(&k(&pairs), n).unwrap();
            assert_eq!(vd.condition_star, vd.sufficient, "n = {n}, {pairs:?}");
        }
    }
}
