//! Global accuracy of both integrators on problems with closed-form solutions.

use bucketwheel::integrator::{integrate, FnSystem, IntegratorConfig, Method};

fn decay() -> FnSystem<impl Fn(f64, &[f64], &mut [f64])> {
    FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0])
}

/// Damped oscillator x'' + 0.2x' + 4x = 0.
fn oscillator() -> FnSystem<impl Fn(f64, &[f64], &mut [f64])> {
    FnSystem::new(2, |_t, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -4.0 * y[0] - 0.2 * y[1];
    })
}

fn oscillator_exact(t: f64) -> [f64; 2] {
    // x(0) = 1, v(0) = 0; roots -0.1 ± iω
    let w = (4.0f64 - 0.01).sqrt();
    let e = (-0.1 * t).exp();
    let (s, c) = (w * t).sin_cos();
    let x = e * (c + 0.1 / w * s);
    let v = -4.0 / w * e * s;
    [x, v]
}

fn rk4_final_error(h: f64) -> f64 {
    let cfg = IntegratorConfig {
        method: Method::Rk4,
        t_end: 10.0,
        output_step: 10.0,
        fixed_step: h,
        ..Default::default()
    };
    let sol = integrate(&mut decay(), &[1.0], &cfg).unwrap();
    (sol.states.last().unwrap()[0] - (-10f64).exp()).abs()
}

#[test]
fn rk4_is_fourth_order() {
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|h| rk4_final_error(*h))
        .collect();
    for pair in errs.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!(order >= 3.7, "observed order {order} from {errs:?}");
    }
}

#[test]
fn rk45_meets_tolerance_on_decay() {
    let cfg = IntegratorConfig {
        t_end: 10.0,
        output_step: 0.5,
        ..Default::default()
    };
    let sol = integrate(&mut decay(), &[1.0], &cfg).unwrap();
    for (t, y) in sol.times.iter().zip(&sol.states) {
        let exact = (-t).exp();
        let allowed = 10.0 * (cfg.rel_tol * exact + cfg.abs_tol);
        assert!(
            (y[0] - exact).abs() <= allowed,
            "t = {t}: {} vs {exact}",
            y[0]
        );
    }
}

#[test]
fn rk45_tracks_linear_oscillator() {
    let cfg = IntegratorConfig {
        t_end: 10.0,
        output_step: 0.1,
        rel_tol: 1e-10,
        abs_tol: 1e-10,
        ..Default::default()
    };
    let sol = integrate(&mut oscillator(), &[1.0, 0.0], &cfg).unwrap();
    assert_eq!(sol.times.len(), 101);
    for (t, y) in sol.times.iter().zip(&sol.states) {
        let exact = oscillator_exact(*t);
        for i in 0..2 {
            assert!(
                (y[i] - exact[i]).abs() < 10.0 * cfg.abs_tol,
                "t = {t}, component {i}: {} vs {}",
                y[i],
                exact[i]
            );
        }
    }
}

#[test]
fn methods_agree_on_oscillator() {
    let base = IntegratorConfig {
        t_end: 5.0,
        output_step: 0.25,
        ..Default::default()
    };
    let rk4 = IntegratorConfig {
        method: Method::Rk4,
        fixed_step: 1e-3,
        ..base
    };
    let a = integrate(&mut oscillator(), &[1.0, 0.0], &base).unwrap();
    let b = integrate(&mut oscillator(), &[1.0, 0.0], &rk4).unwrap();
    assert_eq!(a.times, b.times);
    for (p, q) in a.states.iter().zip(&b.states) {
        assert!((p[0] - q[0]).abs() < 1e-5 && (p[1] - q[1]).abs() < 1e-5);
    }
}

#[test]
fn adaptive_step_counts_are_reported() {
    let sol = integrate(
        &mut decay(),
        &[1.0],
        &IntegratorConfig {
            t_end: 1.0,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(sol.stats.accepted_steps >= 10);
    assert!(sol.stats.rhs_evaluations >= 6 * sol.stats.accepted_steps);
}
