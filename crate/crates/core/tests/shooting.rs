mod common;

use common::solved;
use monopole_core::fit::fit_line;
use monopole_core::shooting::{
    bisect, classify, find_bracket, sigma_profile, solve_forward, translation_gap, Evidence,
    ShootError, ShootingParams, Verdict,
};

#[test]
fn classification_examples() {
    let p = ShootingParams::new(-2.0);
    assert_eq!(classify(-2.0, -0.5, &p).unwrap().verdict, Verdict::Minus);
    let plus = classify(-2.0, 1e6, &p).unwrap();
    assert_eq!(plus.verdict, Verdict::Plus);
    assert!(plus.v >= -1.0 - 1e-9);
}

#[test]
fn converged_slope_sits_between_verdicts() {
    // Inconclusive at n* itself would need |n - n*| far below one ulp of
    // the slope (the separation grows like e^{5t}); the bracket is the
    // observable contract.
    let r = solved(-2.0);
    let p = ShootingParams::new(-2.0);
    let below = classify(-2.0, r.n_star - 2.0 * r.bracket_width, &p).unwrap();
    let above = classify(-2.0, r.n_star + 2.0 * r.bracket_width, &p).unwrap();
    assert_eq!(below.verdict, Verdict::Minus);
    assert_eq!(above.verdict, Verdict::Plus);
    // Both decisions are late: the trajectory first shadows the equilibrium.
    assert!(below.t > 4.0 && above.t > 4.0, "{} {}", below.t, above.t);
    let at = classify(-2.0, r.n_star, &p).unwrap();
    assert!(at.verdict == Verdict::Inconclusive || at.t > 4.0);
}

#[test]
fn brackets_for_extreme_m() {
    let near = ShootingParams::new(-1.1);
    let (lo, hi) = find_bracket(-1.1, &near).unwrap();
    assert!(lo < hi && hi <= 1.0, "({lo}, {hi})");
    let far = ShootingParams::new(-10.0);
    let (lo, hi) = find_bracket(-10.0, &far).unwrap();
    assert!(lo < hi && lo >= 16.0, "({lo}, {hi})");
    let r = bisect(&far).unwrap();
    assert!(r.n_star > solved(-4.0).n_star);
}

#[test]
fn bisection_iterations_and_width() {
    let r = solved(-2.0);
    assert!(r.iterations <= 60);
    assert!(r.bracket_width <= 1e-12);
    assert!(r.n_star > 0.0);
}

#[test]
fn slope_decreases_with_m() {
    let ms = [-4.0, -3.0, -2.0, -1.5, -1.2];
    let ns: Vec<f64> = ms.iter().map(|&m| solved(m).n_star).collect();
    assert!(ns.windows(2).all(|w| w[0] > w[1]), "{ns:?}");
    assert!(ns[4] > 0.0);
}

#[test]
fn slope_is_reproducible() {
    let a = bisect(&ShootingParams::new(-2.0)).unwrap();
    let b = bisect(&ShootingParams::new(-2.0)).unwrap();
    assert!((a.n_star - b.n_star).abs() <= 1e-10);
    assert_eq!(a, b);
}

#[test]
fn hint_reaches_the_same_slope() {
    let base = solved(-3.0);
    let mut p = ShootingParams::new(-3.0);
    p.n_hint = Some(base.n_star * 1.01);
    let hinted = bisect(&p).unwrap();
    assert!((hinted.n_star - base.n_star).abs() <= 2e-12);
}

#[test]
fn backward_trajectory_approaches_equilibrium() {
    let r = solved(-2.0);
    let pts = &r.backward.points;
    assert_eq!(pts[0].x, 0.0);
    let last = pts.last().unwrap();
    assert!((last.x - r.params.t_max).abs() < 1e-12);
    assert!(last.y.abs() < r.params.v_eq_tol, "{}", last.y);
    for w in pts.windows(2) {
        assert!(w[1].x > w[0].x);
        assert!(w[1].y >= w[0].y, "V decreased at t = {}", w[1].x);
    }
    assert!(pts.iter().all(|p| p.y < 0.0 && p.yp > 0.0));
}

#[test]
fn backward_tail_decays_at_rate_four() {
    let r = solved(-2.0);
    let tail: Vec<(f64, f64)> =
        r.backward.iter().filter(|p| p.x >= 4.0).map(|p| (p.x, (-p.y).ln())).collect();
    let fit = fit_line(tail.iter().copied()).unwrap();
    let eps = 4.0 + fit.slope;
    assert!(eps.abs() <= 0.1, "rate {}", -fit.slope);
    // |V + 1| <= C e^{-(4 - eps) t} with C from the fit.
    let c = fit.intercept.exp() * (1.0 + 1e-6);
    for &(t, lw) in &tail {
        assert!(lw.exp() <= c * (-(4.0 - 0.1) * t).exp());
    }
}

#[test]
fn stitch_is_continuous() {
    let r = solved(-2.0);
    let c = r.continuation.expect("t_max = 12 needs the manifold continuation");
    assert!(c.t_match > 0.0 && c.t_match < r.params.t_max);
    assert!(r.stitch_mismatch < 1e-7, "{}", r.stitch_mismatch);
    // The sampled solution is continuous across the matching point.
    let s = -c.t_match;
    let v = r.sample(&[s - 1e-6, s, s + 1e-6]).unwrap();
    assert!((v[0].w - v[1].w).abs() < 1e-8 && (v[2].w - v[1].w).abs() < 1e-8);
    assert!(((v[1].w - c.w_match) / c.w_match).abs() < 1e-9);
}

#[test]
fn forward_solution_signs() {
    let r = solved(-2.0);
    let f = &r.forward.points;
    assert_eq!(f[0].x, 0.0);
    assert_eq!(f[0].yp, -r.n_star);
    assert!(f.iter().all(|p| p.y < 0.0 && p.yp < 0.0));
    for w in f.windows(2) {
        assert!(w[1].y < w[0].y);
        // V'' < 0 means V' strictly decreasing.
        assert!(w[1].yp < w[0].yp);
    }
    let end = f.last().unwrap();
    assert!((end.y - 1.0).abs() >= r.params.blowup_bound * (1.0 - 1e-12));
}

#[test]
fn sigma_starts_at_zero_and_increases() {
    let r = solved(-2.0);
    let sigma = sigma_profile(&r.forward, r.n_star);
    assert_eq!(sigma[0].1, 0.0);
    assert!(sigma.windows(2).all(|w| w[1].1 >= w[0].1));
    let last = sigma.last().unwrap().1;
    assert!(last <= r.sigma_inf && r.sigma_inf - last < 1e-15 + 1e-9 * r.sigma_inf);
    assert!(r.sigma_inf > 0.0);
}

#[test]
fn growth_coefficient_converges() {
    // V e^{-3s} -> -(n* + sigma_inf)/3 and -V' e^{-3s} -> n* + sigma_inf.
    let r = solved(-2.0);
    let amp = r.n_star + r.sigma_inf;
    let end = r.forward.last().unwrap();
    let decay = (-3.0 * end.x).exp();
    assert!(((end.y - 1.0) * decay + amp / 3.0).abs() / amp < 1e-8);
    assert!((-end.yp * decay - amp).abs() / amp < 1e-9);
    let s0 = -((amp / 2.0).ln()) / 3.0;
    assert_eq!(r.s0, s0);
}

#[test]
fn translation_equivalence() {
    let a = solved(-1.5);
    let b = solved(-3.0);
    let gap = translation_gap(&a, &b, 4000).unwrap();
    assert!(gap.sup_scaled < 1e-4, "{gap:?}");
    // The shift agrees with the normalization shifts.
    assert!((gap.shift - (b.s0 - a.s0)).abs() < 1e-8, "{} {}", gap.shift, b.s0 - a.s0);
    assert!(gap.s_max - gap.s_min > 15.0);
}

#[test]
fn value_location_round_trips() {
    let r = solved(-2.0);
    for &s in &[-8.0, -3.0, -0.5, 0.7, 3.0] {
        let w = r.sample(&[s]).unwrap()[0].w;
        let back = r.locate_offset(w).unwrap();
        assert!((back - s).abs() < 1e-7, "s = {s}, located {back}");
    }
    assert_eq!(r.locate_value(-2.0).unwrap(), 0.0);
    let s50 = r.locate_value(-50.0).unwrap();
    let v50 = r.sample(&[s50]).unwrap()[0].v();
    assert!((v50 + 50.0).abs() < 50.0 * 1e-9, "{v50}");
    assert!(matches!(r.locate_value(-0.5), Err(ShootError::ValueNotAttained { .. })));
}

#[test]
fn truncated_forward_run_reports_tail() {
    let mut p = ShootingParams::new(-2.0);
    p.s_max = 0.3;
    let err = bisect(&p).unwrap_err();
    assert!(matches!(err, ShootError::NonConvergentTail { .. }), "{err}");
    let f = solve_forward(-2.0, 3.5, &p).unwrap();
    assert!((f.last().unwrap().x - 0.3).abs() < 1e-12);
}

#[test]
fn evidence_kinds() {
    let p = ShootingParams::new(-2.0);
    assert_eq!(classify(-2.0, 0.0, &p).unwrap().evidence, Evidence::InitialSlope);
    assert_eq!(classify(-2.0, 0.1, &p).unwrap().evidence, Evidence::SlopeTurned);
    assert_eq!(classify(-2.0, 100.0, &p).unwrap().evidence, Evidence::CrossedEquilibrium);
}
