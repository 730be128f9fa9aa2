use approx::assert_relative_eq;
use curveres::odeint::{fixed_step, integrate, IntegratorConfig, Method};

fn decay_rhs(_t: f64, y: &[f64], dydt: &mut [f64]) {
    dydt[0] = -2.0 * y[0];
}

fn grid(n: usize, t1: f64) -> Vec<f64> {
    (0..n).map(|i| t1 * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn exponential_decay_matches_exact_solution() {
    for method in [Method::Rk45, Method::Rk89] {
        let cfg = IntegratorConfig::new(method, 1e-12, 1e-10);
        let sol = integrate(decay_rhs, &[3.0], &grid(11, 2.0), &cfg).unwrap();
        for (i, &t) in sol.times.iter().enumerate() {
            assert_relative_eq!(
                sol.states[(i, 0)],
                3.0 * (-2.0 * t).exp(),
                max_relative = 1e-9
            );
        }
        assert!(sol.steps_accepted > 0);
    }
}

#[test]
fn output_lands_exactly_on_grid() {
    let cfg = IntegratorConfig::new(Method::Rk45, 1e-10, 1e-8);
    let pts = vec![0.0, 0.013, 0.5, 1.0, 2.7];
    let sol = integrate(decay_rhs, &[1.0], &pts, &cfg).unwrap();
    assert_eq!(sol.times, pts);
    assert_eq!(sol.states.rows(), pts.len());
}

#[test]
fn harmonic_oscillator_energy_drift_small_at_tight_tolerance() {
    let cfg = IntegratorConfig::new(Method::Rk89, 1e-13, 1e-12);
    let rhs = |_t: f64, y: &[f64], dydt: &mut [f64]| {
        dydt[0] = y[1];
        dydt[1] = -y[0];
    };
    let sol = integrate(rhs, &[1.0, 0.0], &grid(21, 20.0), &cfg).unwrap();
    for i in 0..sol.times.len() {
        let e = sol.states[(i, 0)].powi(2) + sol.states[(i, 1)].powi(2);
        assert!((e - 1.0).abs() < 1e-10, "energy drift {} at {}", e - 1.0, sol.times[i]);
    }
}

// Explicit Runge-Kutta methods preserve linear first integrals exactly: for
// dy/dt = f with w.f = 0 identically, w.y stays constant to roundoff
// regardless of tolerance.
#[test]
fn linear_invariants_preserved_to_roundoff() {
    let rhs = |_t: f64, y: &[f64], dydt: &mut [f64]| {
        let r = 5.0 * y[0] * y[1];
        dydt[0] = -r;
        dydt[1] = -r;
        dydt[2] = r;
    };
    // w = (1, 0, 1) and (0, 1, 1) are conserved; run at a sloppy tolerance.
    let cfg = IntegratorConfig::new(Method::Rk45, 1e-4, 1e-2);
    let sol = integrate(rhs, &[1.0, 0.7, 0.2], &grid(30, 3.0), &cfg).unwrap();
    for i in 0..sol.times.len() {
        let s1 = sol.states[(i, 0)] + sol.states[(i, 2)];
        let s2 = sol.states[(i, 1)] + sol.states[(i, 2)];
        assert!((s1 - 1.2).abs() < 1e-13);
        assert!((s2 - 0.9).abs() < 1e-13);
    }
}

// Halve the fixed step, fit log2(error ratio): should match the nominal
// propagation order within +/- 0.5.
fn empirical_order(method: Method) -> f64 {
    // y' = 5 y cos(5t), y(0) = 1 has the closed form y = exp(sin(5t)),
    // oscillatory enough that truncation error stays far above roundoff.
    let rhs = |t: f64, y: &[f64], dydt: &mut [f64]| {
        dydt[0] = 5.0 * y[0] * (5.0 * t).cos();
    };
    let exact = (5.0f64 * 2.0).sin().exp();
    let steps: Vec<usize> = match method {
        Method::Rk45 => vec![40, 80, 160, 320],
        Method::Rk89 => vec![10, 15, 22, 33],
    };
    let errs: Vec<f64> = steps
        .iter()
        .map(|&n| (fixed_step(rhs, &[1.0], 0.0, 2.0, n, method)[0] - exact).abs())
        .collect();
    let mut ps = Vec::new();
    for i in 0..errs.len() - 1 {
        let h_ratio = steps[i + 1] as f64 / steps[i] as f64;
        ps.push((errs[i] / errs[i + 1]).ln() / h_ratio.ln());
    }
    ps.iter().sum::<f64>() / ps.len() as f64
}

#[test]
fn fixed_step_convergence_orders_match_nominal() {
    let p5 = empirical_order(Method::Rk45);
    assert!((p5 - 5.0).abs() < 0.5, "measured order {p5} for the 5th-order method");
    let p8 = empirical_order(Method::Rk89);
    assert!((p8 - 8.0).abs() < 0.5, "measured order {p8} for the 8th-order method");
}

#[test]
fn step_limit_failure_returns_partial_solution() {
    let mut cfg = IntegratorConfig::new(Method::Rk45, 1e-14, 1e-13);
    cfg.max_steps = 10;
    let err = integrate(decay_rhs, &[1.0], &grid(50, 50.0), &cfg).unwrap_err();
    assert!(err.message.contains("step limit"));
    let partial = err.partial.expect("partial trajectory");
    assert!(partial.times.len() < 50);
    assert_eq!(partial.times[0], 0.0);
}

#[test]
fn non_finite_rhs_reports_failure_location() {
    let rhs = |t: f64, y: &[f64], dydt: &mut [f64]| {
        dydt[0] = if t > 0.5 { f64::NAN } else { -y[0] };
    };
    let cfg = IntegratorConfig::new(Method::Rk45, 1e-10, 1e-8);
    let err = integrate(rhs, &[1.0], &grid(11, 1.0), &cfg).unwrap_err();
    assert!(err.message.contains("non-finite"), "got: {}", err.message);
    assert!(err.t <= 0.6 + 1e-9);
}

#[test]
fn invalid_inputs_rejected() {
    let cfg = IntegratorConfig::new(Method::Rk45, 1e-10, 1e-8);
    assert!(integrate(decay_rhs, &[1.0], &[0.0, 0.0, 1.0], &cfg).is_err());
    assert!(integrate(decay_rhs, &[1.0], &[], &cfg).is_err());
    let bad = IntegratorConfig::new(Method::Rk45, -1.0, 1e-8);
    assert!(integrate(decay_rhs, &[1.0], &[0.0, 1.0], &bad).is_err());
}

#[test]
fn rejected_steps_are_counted_on_rough_problems() {
    // A sharp transition forces rejections at a loose initial step.
    let rhs = |t: f64, y: &[f64], dydt: &mut [f64]| {
        dydt[0] = -y[0] / (1e-3 + (t - 1.0).powi(2));
    };
    let mut cfg = IntegratorConfig::new(Method::Rk45, 1e-10, 1e-9);
    cfg.initial_step = Some(0.5);
    let sol = integrate(rhs, &[1.0], &[0.0, 2.0], &cfg).unwrap();
    assert!(sol.steps_rejected > 0);
    assert!(sol.steps_accepted > sol.steps_rejected);
}
