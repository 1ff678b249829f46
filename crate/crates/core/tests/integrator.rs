mod common;

use core::f64::consts::PI;

use common::reversed;
use monopole_core::integrator::{
    convergence_order, integrate, Crossing, Event, EventAction, IntegratorConfig, OdeState, Sampling,
    State,
};

fn harmonic(_x: f64, y: &State) -> State {
    [y[1], -y[0]]
}

fn exponential(_x: f64, y: &State) -> State {
    [y[0], y[1]]
}

#[test]
fn cosine_after_half_period() {
    let sol = integrate(
        harmonic,
        OdeState::new(0.0, 1.0, 0.0),
        PI,
        &IntegratorConfig::default(),
        &[],
        Sampling::Steps,
    )
    .unwrap();
    assert!((sol.end.y + 1.0).abs() < 1e-8);
}

#[test]
fn equilibrium_trajectory_is_constant() {
    let sol = integrate(
        reversed,
        OdeState::new(0.0, 0.0, 0.0),
        12.0,
        &IntegratorConfig::default(),
        &[],
        Sampling::Steps,
    )
    .unwrap();
    assert!(sol.trajectory.len() > 2);
    for p in sol.trajectory.iter() {
        assert!(p.y.abs() <= 1e-12 && p.yp.abs() <= 1e-12);
    }
}

#[test]
fn zero_slope_turns_negative() {
    // V(0) = -2, V_t(0) = 0: the sign indicator of V_t < 0 switches on for t > 0.
    let tight = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() };
    let ev = [Event::new("slope-negative", Crossing::Rising, EventAction::Stop, |s: &OdeState| {
        if s.yp < 0.0 {
            1.0
        } else {
            -1.0
        }
    })];
    let sol = integrate(reversed, OdeState::new(0.0, -1.0, 0.0), 5.0, &tight, &ev, Sampling::Steps)
        .unwrap();
    let hit = sol.stopped_by.expect("event fires");
    assert!(hit.state.x > 0.0 && hit.state.x < 1e-3);
    assert!(hit.state.yp < 0.0);
}

#[test]
fn observed_orders_on_reference_problems() {
    let cases: [(&str, f64); 3] = [
        ("harmonic", convergence_order(harmonic, OdeState::new(0.0, 1.0, 0.0), PI).unwrap()),
        ("v-equation", convergence_order(reversed, OdeState::new(0.0, -1.0, 1.0), 2.0).unwrap()),
        ("exponential", convergence_order(exponential, OdeState::new(0.0, 1.0, 1.0), 2.0).unwrap()),
    ];
    for (name, p) in cases {
        assert!((4.0..=6.0).contains(&p), "{name}: order {p}");
    }
}

#[test]
fn halving_tolerances_does_not_increase_error() {
    let reference_cfg = IntegratorConfig { rel_tol: 1e-14, abs_tol: 1e-16, max_step: 0.01, ..Default::default() };
    type Rhs = fn(f64, &State) -> State;
    let problems: [(Rhs, OdeState, f64); 3] = [
        (harmonic, OdeState::new(0.0, 1.0, 0.0), PI),
        (reversed, OdeState::new(0.0, -1.0, 1.0), 2.0),
        (exponential, OdeState::new(0.0, 1.0, 1.0), 2.0),
    ];
    for (rhs, init, x_end) in problems {
        let reference = integrate(rhs, init, x_end, &reference_cfg, &[], Sampling::Steps).unwrap().end;
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let scale = 0.5f64.powi(k);
            let cfg = IntegratorConfig { rel_tol: 1e-7 * scale, abs_tol: 1e-9 * scale, ..Default::default() };
            let end = integrate(rhs, init, x_end, &cfg, &[], Sampling::Steps).unwrap().end;
            let err = (end.y - reference.y).abs().max((end.yp - reference.yp).abs());
            assert!(err <= last * 1.0001, "error grew from {last:e} to {err:e}");
            last = err;
        }
    }
}

#[test]
fn events_are_reproducible_and_ordered() {
    let cfg = IntegratorConfig::default();
    let ev = || [Event::new("zero", Crossing::Any, EventAction::Record, |s: &OdeState| s.y)];
    let run = || {
        integrate(harmonic, OdeState::new(0.0, 1.0, 0.0), 20.0, &cfg, &ev(), Sampling::Steps)
            .unwrap()
            .events
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0].state.x < w[1].state.x));
    for (k, hit) in a.iter().enumerate() {
        assert!((hit.state.x - (PI / 2.0 + k as f64 * PI)).abs() < 1e-10);
    }
}

#[test]
fn non_finite_start_is_rejected() {
    let r = integrate(
        harmonic,
        OdeState::new(0.0, f64::NAN, 0.0),
        1.0,
        &IntegratorConfig::default(),
        &[],
        Sampling::Steps,
    );
    assert!(r.is_err());
}
