//! The acceptance battery shared by `monopole verify` and the test suite.

use std::fmt;

use monopole_core::integrator::{convergence_order, OdeState, State};
use monopole_core::profile::normalized_gap;
use monopole_core::shooting::{classify, translation_gap, Verdict};
use monopole_core::transforms::{
    derivative_r, q_inverse, rhs_r, rhs_r_offset, v_of_g, VValue, DEFAULT_Q_TOL,
};

use crate::config::RunConfig;
use crate::report::{self, limits, shoot, solve, Gate, Solved};

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn from_gate(id: u8, name: &'static str, g: Gate) -> Criterion {
    Criterion { id, name, passed: g.passed, detail: g.detail }
}

fn failed(id: u8, name: &'static str, detail: impl fmt::Display) -> Criterion {
    Criterion { id, name, passed: false, detail: detail.to_string() }
}

pub const UNIQUENESS_PAIR: (f64, f64) = (-1.5, -3.0);
pub const SLOPE_SAMPLE: [f64; 3] = [-4.0, -2.0, -1.2];
pub const PROBES_PER_SIDE: usize = 10;
/// Probe offsets run from `PROBE_OFFSET` up to this, log spaced.
pub const PROBE_SPAN: f64 = 1.0;

/// Runs every criterion with the tolerances and horizons of `cfg`.
pub fn run_battery(cfg: &RunConfig) -> Vec<Criterion> {
    let main = solve(&cfg.shooting, &cfg.model, cfg.grid);
    let mut out = Vec::with_capacity(10);
    let gate = |id: u8, name: &'static str, f: &dyn Fn(&Solved) -> Gate| match &main {
        Ok(s) => from_gate(id, name, f(s)),
        Err(e) => failed(id, name, e),
    };
    out.push(gate(1, "boundary realization", &report::boundary_gate));
    out.push(gate(2, "Bogomolny residuals", &report::residual_gate));
    out.push(gate(3, "monotonicity", &report::monotonicity_gate));
    out.push(gate(4, "far asymptotics", &report::far_gate));
    out.push(gate(5, "near asymptotics", &report::near_gate));
    out.push(uniqueness(cfg));
    out.push(slope_monotonicity(cfg));
    out.push(classification_structure(cfg, main.as_ref().ok()));
    out.push(gate(9, "charge and energy", &|s| report::charge_gate(s, &cfg.model)));
    out.push(numerics());
    out
}

fn uniqueness(cfg: &RunConfig) -> Criterion {
    const NAME: &str = "uniqueness up to translation";
    let (m1, m2) = UNIQUENESS_PAIR;
    let (a, b) = match (shoot(&cfg.shooting_for(m1)), shoot(&cfg.shooting_for(m2))) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return failed(6, NAME, e),
    };
    let points = 4 * cfg.grid;
    let raw = match translation_gap(&a, &b, points) {
        Ok(g) => g,
        Err(e) => return failed(6, NAME, e),
    };
    let (dk, du) = match normalized_gap(&a, &b, &cfg.model, points) {
        Ok(g) => g,
        Err(e) => return failed(6, NAME, e),
    };
    let passed = raw.sup_scaled < limits::UNIQUENESS && dk < limits::UNIQUENESS && du < limits::UNIQUENESS;
    Criterion {
        id: 6,
        name: NAME,
        passed,
        detail: format!(
            "m={m1} vs m={m2}: shift={:.9} (s0 difference {:.9}), sup|dV|/max(1,|V|)={:.3e}; sup|dK|={:.3e} sup|dU|={:.3e}",
            raw.shift,
            b.s0 - a.s0,
            raw.sup_scaled,
            dk,
            du
        ),
    }
}

fn slope_monotonicity(cfg: &RunConfig) -> Criterion {
    const NAME: &str = "shooting-slope monotonicity";
    let mut slopes = Vec::new();
    let mut spread = 0.0f64;
    for m in SLOPE_SAMPLE {
        let p = cfg.shooting_for(m);
        match (shoot(&p), shoot(&p)) {
            (Ok(a), Ok(b)) => {
                spread = spread.max((a.n_star - b.n_star).abs());
                slopes.push(a.n_star);
            }
            (Err(e), _) | (_, Err(e)) => return failed(7, NAME, e),
        }
    }
    let ordered = slopes.windows(2).all(|w| w[0] > w[1]) && slopes[slopes.len() - 1] > 0.0;
    Criterion {
        id: 7,
        name: NAME,
        passed: ordered && spread <= limits::REPRODUCIBILITY,
        detail: format!(
            "n*({})={:.12} > n*({})={:.12} > n*({})={:.12} > 0: {}; repeat spread={:.3e}",
            SLOPE_SAMPLE[0], slopes[0], SLOPE_SAMPLE[1], slopes[1], SLOPE_SAMPLE[2], slopes[2], ordered, spread
        ),
    }
}

fn classification_structure(cfg: &RunConfig, main: Option<&Solved>) -> Criterion {
    const NAME: &str = "classification structure";
    const M: f64 = -2.0;
    let n_star = match main {
        Some(s) if s.shot.m == M => s.shot.n_star,
        _ => match shoot(&cfg.shooting_for(M)) {
            Ok(r) => r.n_star,
            Err(e) => return failed(8, NAME, e),
        },
    };
    let params = cfg.shooting_for(M);
    let ratio = (PROBE_SPAN / limits::PROBE_OFFSET).ln();
    let mut wrong = Vec::new();
    let mut latest = 0.0f64;
    for k in 0..PROBES_PER_SIDE {
        let delta = limits::PROBE_OFFSET * (ratio * k as f64 / (PROBES_PER_SIDE - 1) as f64).exp();
        for (n, want) in [(n_star - delta, Verdict::Minus), (n_star + delta, Verdict::Plus)] {
            match classify(M, n, &params) {
                Ok(c) => {
                    latest = latest.max(c.t);
                    if c.verdict != want {
                        wrong.push(format!("n*{:+.1e} -> {:?}", n - n_star, c.verdict));
                    }
                }
                Err(e) => wrong.push(format!("n*{:+.1e} -> {e}", n - n_star)),
            }
        }
    }
    Criterion {
        id: 8,
        name: NAME,
        passed: wrong.is_empty(),
        detail: if wrong.is_empty() {
            format!(
                "m={M}: {PROBES_PER_SIDE} probes each side at |n-n*| in [{:.0e}, {:.0e}] all classified; latest decision at t={:.3}",
                limits::PROBE_OFFSET,
                PROBE_SPAN,
                latest
            )
        } else {
            format!("misclassified: {}", wrong.join(", "))
        },
    }
}

fn reversed(_t: f64, y: &State) -> State {
    [y[1], rhs_r_offset(y[0]) - 3.0 * y[1]]
}

fn numerics() -> Criterion {
    const NAME: &str = "numerics self-tests";
    // q_inverse round trip over V in [-50, -1 - 1e-10].
    let mut vs: Vec<f64> = (0..=4000).map(|i| -50.0 + i as f64 * (49.0 - 1e-3) / 4000.0).collect();
    vs.extend((0..=700).map(|i| -1.0 - 10f64.powf(-3.0 - 7.0 * i as f64 / 700.0)));
    let mut q_err = 0.0f64;
    let mut q_fail = None;
    for &v in &vs {
        match q_inverse(VValue::new(v).expect("V < -1"), DEFAULT_Q_TOL) {
            Ok(g) => q_err = q_err.max((v_of_g(g).value() - v).abs()),
            Err(e) => q_fail = Some(e),
        }
    }
    // R' against centered differences away from the kink of R'' at -1.
    let mut d_err = 0.0f64;
    for i in 0..=1200 {
        let v = -10.0 + i as f64 * 0.01;
        if (v + 1.0).abs() < 1e-3 {
            continue;
        }
        let h = 1e-5 * v.abs().max(1.0);
        let fd = (rhs_r(v + h) - rhs_r(v - h)) / (2.0 * h);
        let d = derivative_r(v);
        d_err = d_err.max(((fd - d) / d).abs());
    }
    // Observed integrator order.
    let harmonic = |_x: f64, y: &State| -> State { [y[1], -y[0]] };
    let exponential = |_x: f64, y: &State| -> State { [y[0], y[1]] };
    let orders = [
        convergence_order(harmonic, OdeState::new(0.0, 1.0, 0.0), std::f64::consts::PI),
        convergence_order(reversed, OdeState::new(0.0, -1.0, 1.0), 2.0),
        convergence_order(exponential, OdeState::new(0.0, 1.0, 1.0), 2.0),
    ];
    let orders: Vec<f64> = orders.iter().map(|o| o.as_ref().map_or(f64::NAN, |&p| p)).collect();
    let (lo, hi) = limits::ORDER;
    let orders_ok = orders.iter().all(|&p| p >= lo && p <= hi);
    let passed = q_fail.is_none() && q_err < limits::Q_ROUND_TRIP && d_err < limits::R_DERIVATIVE && orders_ok;
    Criterion {
        id: 10,
        name: NAME,
        passed,
        detail: format!(
            "q round trip max err={:.3e} over {} points{}; R' vs differences max rel err={:.3e}; orders harmonic={:.3} v-equation={:.3} exponential={:.3}",
            q_err,
            vs.len(),
            q_fail.map(|e| format!(" (failure: {e})")).unwrap_or_default(),
            d_err,
            orders[0],
            orders[1],
            orders[2]
        ),
    }
}
