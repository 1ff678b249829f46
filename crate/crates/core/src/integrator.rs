//! Adaptive Dormand-Prince 5(4) integration of two-component first order
//! systems `y' = f(x, y)`, with the method's native continuous extension
//! used for event location and for landing on requested sample points.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

/// The two unknowns of the system, `[y, yp]`.
pub type State = [f64; 2];

/// A point on a solution curve. For second order scalar problems `yp` is the
/// derivative of `y`; the integrator itself does not rely on that.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub x: f64,
    pub y: f64,
    pub yp: f64,
}

impl OdeState {
    pub fn new(x: f64, y: f64, yp: f64) -> Self {
        Self { x, y, yp }
    }

    fn from_parts(x: f64, s: &State) -> Self {
        Self { x, y: s[0], yp: s[1] }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.yp.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.25,
            min_step: 1e-14,
            max_steps: 500_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegrateError> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.max_step
            && self.max_steps > 0
            && self.rel_tol.is_finite()
            && self.abs_tol.is_finite()
            && self.max_step.is_finite();
        if ok {
            Ok(())
        } else {
            Err(IntegrateError::InvalidConfig)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrateError {
    InvalidConfig,
    /// `x_end` equals the initial abscissa.
    EmptyInterval,
    StepUnderflow { x: f64, h: f64 },
    TooManySteps { x: f64 },
    NonFinite { x: f64 },
}

impl fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig => f.write_str("invalid integrator configuration"),
            Self::EmptyInterval => f.write_str("integration interval is empty"),
            Self::StepUnderflow { x, h } => write!(f, "step size underflow (h = {h:e}) at x = {x}"),
            Self::TooManySteps { x } => write!(f, "step budget exhausted at x = {x}"),
            Self::NonFinite { x } => write!(f, "solution became non-finite at x = {x}"),
        }
    }
}

impl core::error::Error for IntegrateError {}

/// Which sign changes of an event function count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    /// From negative to non-negative.
    Rising,
    /// From positive to non-positive.
    Falling,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventAction {
    Stop,
    Record,
}

/// A scalar event function of the state with its crossing rule.
pub struct Event<'a> {
    pub label: &'static str,
    pub crossing: Crossing,
    pub action: EventAction,
    func: Box<dyn Fn(&OdeState) -> f64 + 'a>,
}

impl<'a> Event<'a> {
    pub fn new(
        label: &'static str,
        crossing: Crossing,
        action: EventAction,
        func: impl Fn(&OdeState) -> f64 + 'a,
    ) -> Self {
        Self { label, crossing, action, func: Box::new(func) }
    }

    fn eval(&self, s: &OdeState) -> f64 {
        (self.func)(s)
    }

    fn fires(&self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self.crossing {
            Crossing::Rising => rising,
            Crossing::Falling => falling,
            Crossing::Any => rising || falling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventHit {
    /// Index into the event list passed to [`integrate`].
    pub index: usize,
    pub label: &'static str,
    pub state: OdeState,
}

/// Which points end up in the returned trajectory.
#[derive(Debug, Clone, Copy)]
pub enum Sampling<'a> {
    /// The initial point and every accepted step.
    Steps,
    /// Exactly these abscissae, ordered along the integration direction.
    /// Steps are shortened so that each one is hit by a real step.
    At(&'a [f64]),
}

/// An ordered list of solution points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub points: Vec<OdeState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<&OdeState> {
        self.points.first()
    }

    pub fn last(&self) -> Option<&OdeState> {
        self.points.last()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, OdeState> {
        self.points.iter()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    /// Detected events in the order they occurred.
    pub events: Vec<EventHit>,
    /// The stop-flagged event that ended the integration, if any.
    pub stopped_by: Option<EventHit>,
    /// Final state (the event point when stopped early).
    pub end: OdeState,
    pub stats: Stats,
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step size controller (PI, Hairer's constants).
const SAFETY: f64 = 0.9;
const FAC_MIN_INV: f64 = 5.0; // 1 / 0.2
const FAC_MAX_INV: f64 = 0.1; // 1 / 10
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

struct StepResult {
    y: State,
    k7: State,
    err: f64,
    dense: Dense,
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
struct Dense {
    x0: f64,
    h: f64,
    r: [State; 5],
}

impl Dense {
    fn eval(&self, x: f64) -> OdeState {
        let th = (x - self.x0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let r = |j: usize| self.r[j][i];
            *o = r(0) + th * (r(1) + th1 * (r(2) + th * (r(3) + th1 * r(4))));
        }
        OdeState::from_parts(x, &out)
    }
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn dp_step<F: Fn(f64, &State) -> State>(
    f: &F,
    x: f64,
    y: &State,
    k1: &State,
    h: f64,
    cfg: &IntegratorConfig,
) -> StepResult {
    let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(x + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(
        x + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(x + h, &y_new);

    let mut err = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        err += (e / sk) * (e / sk);
    }
    err = libm::sqrt(err / 2.0);

    let mut r = [[0.0; 2]; 5];
    for i in 0..2 {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        r[0][i] = y[i];
        r[1][i] = ydiff;
        r[2][i] = bspl;
        r[3][i] = ydiff - h * k7[i] - bspl;
        r[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    StepResult { y: y_new, k7, err, dense: Dense { x0: x, h, r } }
}

fn initial_step<F: Fn(f64, &State) -> State>(
    f: &F,
    x: f64,
    y: &State,
    k1: &State,
    dir: f64,
    span: f64,
    cfg: &IntegratorConfig,
) -> f64 {
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..2 {
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs();
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * libm::sqrt(dny / dnf) };
    h = h.min(cfg.max_step).min(span);
    let y1 = axpy(y, dir * h, &[(1.0, k1)]);
    let k2 = f(x + dir * h, &y1);
    let mut der2 = 0.0;
    for i in 0..2 {
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs();
        der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
    }
    let der2 = libm::sqrt(der2) / h;
    let der12 = der2.max(libm::sqrt(dnf));
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        libm::pow(0.01 / der12, 0.2)
    };
    (100.0 * h).min(h1).min(cfg.max_step).min(span).max(cfg.min_step)
}

/// Locates the earliest root of `event` on the step covered by `dense`.
fn locate(event: &Event<'_>, dense: &Dense, x_a: f64, g_a: f64, x_b: f64) -> OdeState {
    let mut a = x_a;
    let mut b = x_b;
    let mut ga = g_a;
    let tol = 1e-12f64.max(4.0 * f64::EPSILON * x_b.abs());
    while (b - a).abs() > tol {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let gm = event.eval(&dense.eval(mid));
        if event.fires(ga, gm) {
            b = mid;
        } else {
            a = mid;
            ga = gm;
        }
    }
    dense.eval(b)
}

/// Integrates `y' = rhs(x, y)` from `init` toward `x_end`.
pub fn integrate<F>(
    rhs: F,
    init: OdeState,
    x_end: f64,
    cfg: &IntegratorConfig,
    events: &[Event<'_>],
    sampling: Sampling<'_>,
) -> Result<Solution, IntegrateError>
where
    F: Fn(f64, &State) -> State,
{
    cfg.validate()?;
    if x_end == init.x || !x_end.is_finite() || !init.is_finite() {
        return Err(if init.is_finite() {
            IntegrateError::EmptyInterval
        } else {
            IntegrateError::NonFinite { x: init.x }
        });
    }
    let dir = if x_end > init.x { 1.0 } else { -1.0 };
    let mut stats = Stats::default();
    let f = |x: f64, y: &State| -> State { rhs(x, y) };

    let mut x = init.x;
    let mut y: State = [init.y, init.yp];
    let mut k1 = f(x, &y);
    stats.evaluations += 1;

    let targets: &[f64] = match sampling {
        Sampling::Steps => &[],
        Sampling::At(pts) => pts,
    };
    // Skip targets behind the start; record any that coincide with it.
    let mut next_target = 0;
    let mut points = Vec::new();
    match sampling {
        Sampling::Steps => points.push(init),
        Sampling::At(_) => {
            while next_target < targets.len() && (targets[next_target] - x) * dir <= 0.0 {
                if targets[next_target] == x {
                    points.push(init);
                }
                next_target += 1;
            }
        }
    }

    let mut g_prev: Vec<f64> = events.iter().map(|e| e.eval(&init)).collect();
    let mut hits = Vec::new();

    let span = (x_end - x).abs();
    let mut h = dir * initial_step(&f, x, &y, &k1, dir, span, cfg);
    stats.evaluations += 1;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if (x_end - x) * dir <= 0.0 {
            break;
        }
        if stats.accepted >= cfg.max_steps {
            return Err(IntegrateError::TooManySteps { x });
        }
        if h.abs() > cfg.max_step {
            h = dir * cfg.max_step;
        }

        // Shorten the step to land on the next target or the end point.
        let mut h_try = h;
        let mut landing: Option<f64> = None;
        if (x + h_try - x_end) * dir >= 0.0 {
            h_try = x_end - x;
            landing = Some(x_end);
        }
        if let Some(&p) = targets.get(next_target) {
            if (x + h_try - p) * dir >= 0.0 {
                h_try = p - x;
                landing = Some(p);
            }
        }

        let step = dp_step(&f, x, &y, &k1, h_try, cfg);
        stats.evaluations += 6;

        let finite = step.y.iter().all(|v| v.is_finite()) && step.err.is_finite();
        if !finite {
            stats.rejected += 1;
            h = h_try * 0.1;
            last_rejected = true;
            if h.abs() < cfg.min_step {
                return Err(IntegrateError::NonFinite { x });
            }
            continue;
        }

        let err = step.err;
        let fac11 = libm::pow(err, EXPO1);
        if err <= 1.0 {
            stats.accepted += 1;
            let x_new = landing.unwrap_or(x + h_try);
            let new_state = OdeState::from_parts(x_new, &step.y);

            // Events on this step, earliest first.
            let mut found: Vec<(usize, OdeState)> = Vec::new();
            let g_new: Vec<f64> = events.iter().map(|e| e.eval(&new_state)).collect();
            for (i, ev) in events.iter().enumerate() {
                if ev.fires(g_prev[i], g_new[i]) {
                    let at = locate(ev, &step.dense, x, g_prev[i], x_new);
                    found.push((i, at));
                }
            }
            found.sort_by(|a, b| {
                let da = (a.1.x - x) * dir;
                let db = (b.1.x - x) * dir;
                da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
            });
            let mut stop: Option<EventHit> = None;
            for (i, at) in found {
                let hit = EventHit { index: i, label: events[i].label, state: at };
                hits.push(hit);
                if events[i].action == EventAction::Stop {
                    stop = Some(hit);
                    break;
                }
            }

            if let Some(hit) = stop {
                match sampling {
                    Sampling::Steps => points.push(hit.state),
                    Sampling::At(_) => {
                        while let Some(&p) = targets.get(next_target) {
                            if (hit.state.x - p) * dir < 0.0 {
                                break;
                            }
                            points.push(step.dense.eval(p));
                            next_target += 1;
                        }
                    }
                }
                return Ok(Solution {
                    trajectory: Trajectory { points },
                    events: hits,
                    stopped_by: Some(hit),
                    end: hit.state,
                    stats,
                });
            }

            match sampling {
                Sampling::Steps => points.push(new_state),
                Sampling::At(_) => {
                    if landing.is_some() {
                        while let Some(&p) = targets.get(next_target) {
                            if (x_new - p) * dir < 0.0 {
                                break;
                            }
                            if p == x_new {
                                points.push(new_state);
                            }
                            next_target += 1;
                        }
                    }
                }
            }

            g_prev = g_new;
            x = x_new;
            y = step.y;
            k1 = step.k7;

            let mut fac = fac11 / libm::pow(facold, BETA);
            fac = FAC_MAX_INV.max(FAC_MIN_INV.min(fac / SAFETY));
            let mut h_new = h_try / fac;
            facold = err.max(1e-4);
            if last_rejected && h_new.abs() > h_try.abs() {
                h_new = h_try;
            }
            last_rejected = false;
            // A step shortened for landing says nothing new about the scale.
            h = if landing.is_some() && h_try.abs() < h.abs() { h } else { h_new };
        } else {
            stats.rejected += 1;
            h = h_try / FAC_MIN_INV.min(fac11 / SAFETY);
            last_rejected = true;
            if h.abs() < cfg.min_step {
                return Err(IntegrateError::StepUnderflow { x, h });
            }
        }
    }

    let end = OdeState::from_parts(x, &y);
    Ok(Solution { trajectory: Trajectory { points }, events: hits, stopped_by: None, end, stats })
}

/// Fixed-step Dormand-Prince integration with `n_steps` equal steps.
pub fn integrate_fixed<F>(rhs: F, init: OdeState, x_end: f64, n_steps: usize) -> OdeState
where
    F: Fn(f64, &State) -> State,
{
    let cfg = IntegratorConfig::default();
    let h = (x_end - init.x) / n_steps.max(1) as f64;
    let mut x = init.x;
    let mut y: State = [init.y, init.yp];
    let mut k1 = rhs(x, &y);
    for i in 0..n_steps.max(1) {
        let step = dp_step(&rhs, x, &y, &k1, h, &cfg);
        y = step.y;
        k1 = step.k7;
        x = init.x + (i + 1) as f64 * h;
    }
    OdeState::from_parts(x_end, &y)
}

/// Observed order of accuracy from fixed-step runs with `N` and `2N` steps,
/// measured against a tight adaptive reference. `N = max(32, 16 |span|)`.
pub fn convergence_order<F>(rhs: F, init: OdeState, x_end: f64) -> Result<f64, IntegrateError>
where
    F: Fn(f64, &State) -> State,
{
    let reference_cfg = IntegratorConfig {
        rel_tol: 1e-14,
        abs_tol: 1e-16,
        max_step: 0.01,
        min_step: 1e-15,
        max_steps: 10_000_000,
    };
    let reference = integrate(&rhs, init, x_end, &reference_cfg, &[], Sampling::Steps)?.end;
    let span = (x_end - init.x).abs();
    let n = 32usize.max(libm::ceil(16.0 * span) as usize);
    let err = |s: OdeState| libm::hypot(s.y - reference.y, s.yp - reference.yp);
    let coarse = err(integrate_fixed(&rhs, init, x_end, n));
    let fine = err(integrate_fixed(&rhs, init, x_end, 2 * n));
    Ok(libm::log2(coarse / fine))
}
