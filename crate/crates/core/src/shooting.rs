//! Dynamical shooting for `V'' - 3V' = R(V)`, `V(-inf) = -1`,
//! `V(+inf) = -inf`.
//!
//! With `V(0) = m < -1` fixed, the reversed problem
//! `V_tt + 3 V_t = R(V)`, `V(0) = m`, `V_t(0) = n` (with `t = -s`) sorts every
//! slope `n` into one of three sets:
//!
//! - minus: `V_t` turns negative at some `t > 0`;
//! - plus: `V_t > 0` throughout and `V` rises above `-1`;
//! - zero: `V_t > 0` and `V <= -1` for all `t`, the trajectory creeping up to
//!   the equilibrium.
//!
//! The minus and plus sets are open intervals `(-inf, n*)` and `(n*, inf)` and
//! the zero set is the single point `n*`. Bisection on the classification
//! converges to it.
//!
//! Near the equilibrium the reversed problem is a saddle: a slope error
//! `dn` grows like `dn e^t / 5` while the solution decays like `e^{-4t}`. The
//! bisected trajectory is therefore only followed until `|V + 1|` has dropped
//! by three orders of magnitude. Past that point the solution is continued
//! along the one-dimensional unstable manifold of the equilibrium, integrated
//! in increasing `s` (the stable direction) and matched on the value of `V`.
//!
//! All states carry `w = V + 1` instead of `V`.

use alloc::vec::Vec;
use core::fmt;

use crate::integrator::{
    integrate, Crossing, Event, EventAction, IntegrateError, IntegratorConfig, OdeState, Sampling,
    State, Trajectory,
};
use crate::transforms::{q_of_offset, rhs_r_offset, TransformError, DEFAULT_Q_TOL};

/// Cap on bracket doublings/halvings.
const MAX_EXPANSIONS: usize = 80;
/// Cap on bisection iterations; the width is ulp-limited long before this.
const MAX_BISECTIONS: usize = 200;
/// The bisected backward trajectory is followed until `|V + 1|` has
/// shrunk by this factor relative to `|m + 1|`.
const MATCH_FRACTION: f64 = 1e-3;
/// `K^2` at the end of the forward run above which the analytic tail
/// closure of `sigma` is rejected.
pub const TAIL_F_TOL: f64 = 1e-8;
/// Unstable eigenvalue of the linearization `v'' - 3v' - 4v = 0`.
const UNSTABLE_RATE: f64 = 4.0;
/// Spacing of the stored tail samples on the reversed axis.
const TAIL_SPACING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingParams {
    /// `V(0)`, must be below `-1`.
    pub m: f64,
    /// Starting guess for the bracket search.
    pub n_hint: Option<f64>,
    /// Horizon on the reversed axis.
    pub t_max: f64,
    /// Horizon on the forward axis; usually the blow-up guard stops first.
    pub s_max: f64,
    pub bisect_tol: f64,
    /// Required closeness of `V(t_max)` to `-1` for an inconclusive verdict.
    pub v_eq_tol: f64,
    /// Forward integration stops once `|V|` exceeds this.
    pub blowup_bound: f64,
    pub ode: IntegratorConfig,
}

impl ShootingParams {
    pub fn new(m: f64) -> Self {
        Self {
            m,
            n_hint: None,
            t_max: 12.0,
            s_max: 12.0,
            bisect_tol: 1e-12,
            v_eq_tol: 1e-8,
            blowup_bound: 1e10,
            ode: IntegratorConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ShootError> {
        let bad = |what| Err(ShootError::InvalidParams(what));
        if !(self.m < -1.0) || !self.m.is_finite() {
            return bad("m must be a finite value below -1");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("t_max must be positive");
        }
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return bad("s_max must be positive");
        }
        if !(self.bisect_tol > 0.0) || !(self.v_eq_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.blowup_bound > 1.0) {
            return bad("blow-up bound must exceed 1");
        }
        if let Some(h) = self.n_hint {
            if !(h > 0.0 && h.is_finite()) {
                return bad("n_hint must be positive");
            }
        }
        self.ode.validate().map_err(ShootError::Integrate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShootError {
    InvalidParams(&'static str),
    Integrate(IntegrateError),
    Transform(TransformError),
    /// Neither event fired before `t_max` and `V(t_max)` is not near `-1`.
    HorizonTooShort { t_max: f64, distance: f64 },
    BracketNotFound { m: f64, last_n: f64 },
    /// The bisected slope left the zero set before the matching point.
    NotConverged { n: f64, t: f64 },
    /// The forward solution left the physical branch.
    ForwardBranch { s: f64 },
    /// `K^2` was not negligible at the end of the forward run.
    NonConvergentTail { s_end: f64, f_end: f64 },
    ValueNotAttained { v: f64 },
}

impl fmt::Display for ShootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParams(what) => write!(f, "invalid shooting parameters: {what}"),
            Self::Integrate(e) => write!(f, "integration failed: {e}"),
            Self::Transform(e) => write!(f, "transform failed: {e}"),
            Self::HorizonTooShort { t_max, distance } => write!(
                f,
                "no decision by t_max = {t_max} and |V + 1| = {distance:e} is not small; increase t_max"
            ),
            Self::BracketNotFound { m, last_n } => {
                write!(f, "no overshooting slope found for m = {m} (last tried n = {last_n:e})")
            }
            Self::NotConverged { n, t } => {
                write!(f, "slope n = {n} left the equilibrium approach at t = {t}")
            }
            Self::ForwardBranch { s } => write!(f, "forward solution left V < -1, V' < 0 at s = {s}"),
            Self::NonConvergentTail { s_end, f_end } => write!(
                f,
                "sigma tail not converged: K^2 = {f_end:e} at s = {s_end}; increase s_max"
            ),
            Self::ValueNotAttained { v } => write!(f, "V = {v} is not attained on the solution"),
        }
    }
}

impl core::error::Error for ShootError {}

impl From<IntegrateError> for ShootError {
    fn from(e: IntegrateError) -> Self {
        Self::Integrate(e)
    }
}

impl From<TransformError> for ShootError {
    fn from(e: TransformError) -> Self {
        Self::Transform(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Minus,
    Plus,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    /// `n <= 0`: `V_t` is negative immediately after `t = 0`.
    InitialSlope,
    /// `V_t` changed sign from positive to negative.
    SlopeTurned,
    /// `V` rose through `-1` with `V_t > 0`.
    CrossedEquilibrium,
    /// Neither happened and `V(t_max)` sits within `v_eq_tol` of `-1`.
    Settled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
    /// Location of the deciding event on the reversed axis.
    pub t: f64,
    /// `V` at that location.
    pub v: f64,
}

/// Reversed-axis system `w'' + 3 w' = R(w)` with state `[w, w']`.
fn reversed_rhs(_t: f64, y: &State) -> State {
    [y[1], rhs_r_offset(y[0]) - 3.0 * y[1]]
}

/// Forward-axis system `w'' - 3 w' = R(w)` with state `[w, w']`.
fn forward_rhs(_s: f64, y: &State) -> State {
    [y[1], rhs_r_offset(y[0]) + 3.0 * y[1]]
}

/// Forward-axis system in `[w, W]` with `W = -V' e^{-3s} = n + sigma(s)`.
///
/// `W` stays bounded while `V'` grows like `e^{3s}`, so the blow-up region
/// costs no accuracy in the quantity that fixes the normalization.
fn forward_scaled_rhs(s: f64, y: &State) -> State {
    [-y[1] * libm::exp(3.0 * s), -libm::exp(-3.0 * s) * rhs_r_offset(y[0])]
}

fn check_m(m: f64) -> Result<(), ShootError> {
    if m < -1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(ShootError::InvalidParams("m must be a finite value below -1"))
    }
}

/// Sorts the slope `n` into the minus/plus sets, or reports an inconclusive
/// approach to the equilibrium.
pub fn classify(m: f64, n: f64, params: &ShootingParams) -> Result<Classification, ShootError> {
    check_m(m)?;
    if n <= 0.0 {
        return Ok(Classification { verdict: Verdict::Minus, evidence: Evidence::InitialSlope, t: 0.0, v: m });
    }
    let events = [
        Event::new("slope-negative", Crossing::Falling, EventAction::Stop, |s: &OdeState| s.yp),
        Event::new("crossed-equilibrium", Crossing::Rising, EventAction::Stop, |s: &OdeState| s.y),
    ];
    let sol = integrate(
        reversed_rhs,
        OdeState::new(0.0, m + 1.0, n),
        params.t_max,
        &params.ode,
        &events,
        Sampling::At(&[]),
    )?;
    match sol.stopped_by {
        Some(hit) if hit.index == 0 => Ok(Classification {
            verdict: Verdict::Minus,
            evidence: Evidence::SlopeTurned,
            t: hit.state.x,
            v: hit.state.y - 1.0,
        }),
        Some(hit) => Ok(Classification {
            verdict: Verdict::Plus,
            evidence: Evidence::CrossedEquilibrium,
            t: hit.state.x,
            v: hit.state.y - 1.0,
        }),
        None => {
            let distance = sol.end.y.abs();
            if distance < params.v_eq_tol {
                Ok(Classification {
                    verdict: Verdict::Inconclusive,
                    evidence: Evidence::Settled,
                    t: sol.end.x,
                    v: sol.end.y - 1.0,
                })
            } else {
                Err(ShootError::HorizonTooShort { t_max: params.t_max, distance })
            }
        }
    }
}

/// Finds `n_lo < n_hi` classified minus and plus.
///
/// Returns a zero-width bracket if a probe is inconclusive.
pub fn find_bracket(m: f64, params: &ShootingParams) -> Result<(f64, f64), ShootError> {
    check_m(m)?;
    let verdict = |n: f64| classify(m, n, params).map(|c| c.verdict);
    let start = params.n_hint.unwrap_or(1.0);
    match verdict(start)? {
        Verdict::Inconclusive => Ok((start, start)),
        Verdict::Plus => {
            let mut hi = start;
            for _ in 0..MAX_EXPANSIONS {
                let lo = 0.5 * hi;
                match verdict(lo)? {
                    Verdict::Plus => hi = lo,
                    Verdict::Minus => return Ok((lo, hi)),
                    Verdict::Inconclusive => return Ok((lo, lo)),
                }
            }
            // Every n <= 0 is in the minus set.
            Ok((0.0, hi))
        }
        Verdict::Minus => {
            let mut lo = start;
            for _ in 0..MAX_EXPANSIONS {
                let hi = 2.0 * lo;
                match verdict(hi)? {
                    Verdict::Plus => return Ok((lo, hi)),
                    Verdict::Minus => lo = hi,
                    Verdict::Inconclusive => return Ok((hi, hi)),
                }
            }
            Err(ShootError::BracketNotFound { m, last_n: lo })
        }
    }
}

/// Continuation of the backward solution along the unstable manifold.
///
/// The manifold solution is integrated on its own axis `x` starting from
/// `w = -delta`, `w' = -4 delta`; `x_cross` is where it reaches the matching
/// value. Reversed-axis time is `t = t_match + x_cross - x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Continuation {
    pub t_match: f64,
    pub w_match: f64,
    pub delta: f64,
    pub x_cross: f64,
}

impl Continuation {
    fn x_of_t(&self, t: f64) -> f64 {
        self.t_match + self.x_cross - t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub m: f64,
    pub n_star: f64,
    /// `lim sigma(s)`.
    pub sigma_inf: f64,
    /// Shift making `U(inf) = 1`: physical `s` equals shooting `s` minus `s0`.
    pub s0: f64,
    pub bracket_width: f64,
    pub iterations: usize,
    /// Reversed axis, `t` in `[0, t_max]`, points `(t, V + 1, V_t)`.
    pub backward: Trajectory,
    /// Forward axis, `s` in `[0, s_end]`, points `(s, V + 1, V')`.
    pub forward: Trajectory,
    /// Where the forward run stopped.
    pub s_end: f64,
    pub continuation: Option<Continuation>,
    /// Relative disagreement of `V_t` at the matching point.
    pub stitch_mismatch: f64,
    pub params: ShootingParams,
}

/// A point of the solution on the shooting axis `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VPoint {
    pub s: f64,
    /// `V + 1`.
    pub w: f64,
    /// `dV/ds`.
    pub dv: f64,
}

impl VPoint {
    pub fn v(&self) -> f64 {
        self.w - 1.0
    }
}

fn tight(cfg: &IntegratorConfig) -> IntegratorConfig {
    // Pure relative control: the tail values run down to ~1e-25.
    IntegratorConfig { abs_tol: 1e-300, ..*cfg }
}

/// Integrates the reversed problem at `n` until `|w|` drops to
/// `MATCH_FRACTION |m + 1|` (or `t_max`), failing if either classification
/// event fires first.
fn bisected_head(
    m: f64,
    n: f64,
    params: &ShootingParams,
    sampling: Sampling<'_>,
    t_end: f64,
) -> Result<(crate::integrator::Solution, f64), ShootError> {
    let w_match = -MATCH_FRACTION * (m + 1.0).abs();
    let events = [
        Event::new("match", Crossing::Rising, EventAction::Stop, move |s: &OdeState| s.y - w_match),
        Event::new("slope-negative", Crossing::Falling, EventAction::Stop, |s: &OdeState| s.yp),
        Event::new("crossed-equilibrium", Crossing::Rising, EventAction::Stop, |s: &OdeState| s.y),
    ];
    let sol = integrate(
        reversed_rhs,
        OdeState::new(0.0, m + 1.0, n),
        t_end,
        &params.ode,
        &events,
        sampling,
    )?;
    if let Some(hit) = sol.stopped_by {
        if hit.index != 0 {
            return Err(ShootError::NotConverged { n, t: hit.state.x });
        }
    }
    Ok((sol, w_match))
}

/// Builds the manifold continuation matching `(t_match, w_match)`.
fn build_continuation(
    t_match: f64,
    w_match: f64,
    params: &ShootingParams,
) -> Result<(Continuation, f64), ShootError> {
    let span = params.t_max - t_match;
    let cfg = tight(&params.ode);
    let mut margin = 1.0;
    for _ in 0..6 {
        let delta = (w_match.abs() * libm::exp(-UNSTABLE_RATE * (span + margin))).max(1e-290);
        let events = [Event::new("match", Crossing::Falling, EventAction::Stop, move |s: &OdeState| {
            s.y - w_match
        })];
        let sol = integrate(
            forward_rhs,
            OdeState::new(0.0, -delta, -UNSTABLE_RATE * delta),
            span + margin + 40.0,
            &cfg,
            &events,
            Sampling::At(&[]),
        )?;
        let hit = sol.stopped_by.ok_or(ShootError::ValueNotAttained { v: w_match - 1.0 })?;
        if hit.state.x >= span {
            let c = Continuation { t_match, w_match, delta, x_cross: hit.state.x };
            return Ok((c, hit.state.yp));
        }
        margin += span - hit.state.x + 1.0;
    }
    Err(ShootError::InvalidParams("t_max too large for the manifold continuation"))
}

/// Backward solution at the converged slope, stitched to its manifold tail.
fn stitch_backward(
    m: f64,
    n: f64,
    params: &ShootingParams,
) -> Result<(Trajectory, Option<Continuation>, f64), ShootError> {
    let (head, w_match) = bisected_head(m, n, params, Sampling::Steps, params.t_max)?;
    let mut traj = head.trajectory;
    let Some(hit) = head.stopped_by else {
        return Ok((traj, None, 0.0));
    };
    let t_match = hit.state.x;
    let (cont, dv_cross) = build_continuation(t_match, w_match, params)?;
    let mismatch = ((hit.state.yp + dv_cross) / hit.state.yp).abs();

    let count = libm::ceil((params.t_max - t_match) / TAIL_SPACING).max(1.0) as usize;
    // Ascending in the manifold axis means descending in t.
    let xs: Vec<f64> = (0..=count)
        .rev()
        .map(|k| {
            let t = if k == count { params.t_max } else { t_match + k as f64 * TAIL_SPACING };
            cont.x_of_t(t)
        })
        .collect();
    let tail = integrate(
        forward_rhs,
        OdeState::new(0.0, -cont.delta, -UNSTABLE_RATE * cont.delta),
        *xs.last().unwrap_or(&cont.x_cross),
        &tight(&params.ode),
        &[],
        Sampling::At(&xs),
    )?;
    let mut tail_pts: Vec<OdeState> = tail
        .trajectory
        .points
        .iter()
        .map(|p| OdeState::new(t_match + cont.x_cross - p.x, p.y, -p.yp))
        .filter(|p| p.x > t_match)
        .collect();
    tail_pts.reverse();
    traj.points.extend(tail_pts);
    Ok((traj, Some(cont), mismatch))
}

/// Integrates `V'' - 3V' = R(V)` from `(m, -n_star)` over `s >= 0` until
/// `|V|` exceeds the blow-up bound or `s_max` is reached.
///
/// Points are `(s, V + 1, V')`.
pub fn solve_forward(m: f64, n_star: f64, params: &ShootingParams) -> Result<Trajectory, ShootError> {
    check_m(m)?;
    if !(n_star > 0.0) {
        return Err(ShootError::InvalidParams("n_star must be positive"));
    }
    let floor = 1.0 - params.blowup_bound;
    let events =
        [Event::new("blow-up", Crossing::Falling, EventAction::Stop, move |s: &OdeState| s.y - floor)];
    let sol = integrate(
        forward_scaled_rhs,
        OdeState::new(0.0, m + 1.0, n_star),
        params.s_max,
        &params.ode,
        &events,
        Sampling::Steps,
    )?;
    let mut points = Vec::with_capacity(sol.trajectory.len());
    for p in sol.trajectory.iter() {
        if !(p.y < 0.0 && p.yp > 0.0) {
            return Err(ShootError::ForwardBranch { s: p.x });
        }
        points.push(OdeState::new(p.x, p.y, -p.yp * libm::exp(3.0 * p.x)));
    }
    Ok(Trajectory { points })
}

/// `sigma(s) = -V'(s) e^{-3s} - n` along the forward trajectory.
pub fn sigma_profile(forward: &Trajectory, n_star: f64) -> Vec<(f64, f64)> {
    forward.iter().map(|p| (p.x, -p.yp * libm::exp(-3.0 * p.x) - n_star)).collect()
}

/// `sigma_inf` and the normalization shift `s0 = -ln((n + sigma_inf)/2)/3`.
///
/// The remainder beyond the last point is closed analytically:
/// `2 int_{s_end}^inf (1 - K^2)^2 e^{-3s} ds = (2/3) e^{-3 s_end}` once `K^2`
/// is negligible.
pub fn sigma_and_shift(forward: &Trajectory, n_star: f64) -> Result<(f64, f64), ShootError> {
    let last = forward.last().ok_or(ShootError::InvalidParams("empty forward trajectory"))?;
    let g = q_of_offset(last.y, DEFAULT_Q_TOL)?.value();
    let f_end = libm::exp(g);
    if f_end > TAIL_F_TOL {
        return Err(ShootError::NonConvergentTail { s_end: last.x, f_end });
    }
    let decay = libm::exp(-3.0 * last.x);
    let sigma_inf = -last.yp * decay - n_star + 2.0 / 3.0 * decay;
    let s0 = -libm::log(0.5 * (n_star + sigma_inf)) / 3.0;
    Ok((sigma_inf, s0))
}

/// Brackets and bisects the shooting slope for `params.m`, then assembles
/// the stitched solution and its normalization.
pub fn bisect(params: &ShootingParams) -> Result<ShootingResult, ShootError> {
    params.validate()?;
    let m = params.m;
    let (mut lo, mut hi) = find_bracket(m, params)?;
    let mut iterations = 0;
    while hi - lo > params.bisect_tol && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        match classify(m, mid, params)?.verdict {
            Verdict::Minus => lo = mid,
            Verdict::Plus => hi = mid,
            Verdict::Inconclusive => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let n_star = 0.5 * (lo + hi);
    let (backward, continuation, stitch_mismatch) = stitch_backward(m, n_star, params)?;
    let forward = solve_forward(m, n_star, params)?;
    let (sigma_inf, s0) = sigma_and_shift(&forward, n_star)?;
    let s_end = forward.last().map_or(0.0, |p| p.x);
    Ok(ShootingResult {
        m,
        n_star,
        sigma_inf,
        s0,
        bracket_width: hi - lo,
        iterations,
        backward,
        forward,
        s_end,
        continuation,
        stitch_mismatch,
        params: *params,
    })
}

/// `|V|` beyond which `K^2 = e^{G}` underflows and the deficit is analytic.
const DEFICIT_START: f64 = 800.0;

impl ShootingResult {
    /// Smallest shooting-axis `s` covered by the stitched solution.
    pub fn s_start(&self) -> f64 {
        -self.params.t_max
    }

    /// `n* + sigma_inf`, the limit of `-V' e^{-3s}`.
    pub fn amplitude(&self) -> f64 {
        self.n_star + self.sigma_inf
    }

    /// `D(s) = sigma_inf - sigma(s) = 2 int_s^inf (1 - K^2)^2 e^{-3s'} ds'` at
    /// ascending shooting-axis points on the forward side.
    ///
    /// `D` is integrated inward from the far end with its own relative error
    /// control, so it stays accurate where `n* + sigma(s)` is within rounding
    /// of its limit.
    pub fn sample_deficit(&self, s_points: &[f64]) -> Result<Vec<f64>, ShootError> {
        if s_points.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(ShootError::InvalidParams("sample points must be ascending"));
        }
        if s_points.first().is_some_and(|&s| s < 0.0) {
            return Err(ShootError::InvalidParams("deficit is only defined for s >= 0"));
        }
        let start = self
            .forward
            .iter()
            .find(|p| p.y < -DEFICIT_START)
            .or(self.forward.last())
            .ok_or(ShootError::InvalidParams("empty forward trajectory"))?;
        let (x0, w0) = (start.x, start.y);
        let tail = |x: f64| 2.0 / 3.0 * libm::exp(-3.0 * x);
        let split = s_points.partition_point(|&s| s < x0);
        let mut out = Vec::with_capacity(s_points.len());
        if split > 0 {
            let a = self.amplitude();
            let rhs = move |s: f64, y: &State| -> State {
                [-(a - y[1]) * libm::exp(3.0 * s), libm::exp(-3.0 * s) * rhs_r_offset(y[0])]
            };
            let xs: Vec<f64> = s_points[..split].iter().rev().copied().collect();
            let sol = integrate(
                rhs,
                OdeState::new(x0, w0, tail(x0)),
                xs[xs.len() - 1],
                &tight(&self.params.ode),
                &[],
                Sampling::At(&xs),
            )?;
            if sol.trajectory.len() != split {
                return Err(ShootError::InvalidParams("deficit sampling failed"));
            }
            out.extend(sol.trajectory.iter().rev().map(|p| p.yp));
        }
        out.extend(s_points[split..].iter().map(|&x| tail(x)));
        Ok(out)
    }

    /// Evaluates the stitched solution at ascending shooting-axis points in
    /// `[-t_max, s_end]`, re-integrating each piece so that every point is
    /// hit by an actual step.
    pub fn sample(&self, s_points: &[f64]) -> Result<Vec<VPoint>, ShootError> {
        if s_points.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(ShootError::InvalidParams("sample points must be ascending"));
        }
        let t_match = self.continuation.map_or(f64::INFINITY, |c| c.t_match);
        let split_fwd = s_points.partition_point(|&s| s < 0.0);
        let split_tail = s_points.partition_point(|&s| s < -t_match);
        let (tail, rest) = s_points.split_at(split_tail);
        let (back, fwd) = rest.split_at(split_fwd - split_tail);
        let mut out = Vec::with_capacity(s_points.len());

        if let (Some(c), false) = (self.continuation, tail.is_empty()) {
            let xs: Vec<f64> = tail.iter().map(|&s| c.x_of_t(-s)).collect();
            let sol = integrate(
                forward_rhs,
                OdeState::new(0.0, -c.delta, -UNSTABLE_RATE * c.delta),
                *xs.last().unwrap_or(&c.x_cross),
                &tight(&self.params.ode),
                &[],
                Sampling::At(&xs),
            )?;
            out.extend(sol.trajectory.iter().zip(tail).map(|(p, &s)| VPoint { s, w: p.y, dv: p.yp }));
        }

        if !back.is_empty() {
            let ts: Vec<f64> = back.iter().rev().map(|&s| -s).collect();
            let sol = integrate(
                reversed_rhs,
                OdeState::new(0.0, self.m + 1.0, self.n_star),
                ts[ts.len() - 1],
                &self.params.ode,
                &[],
                Sampling::At(&ts),
            )?;
            let mut pts: Vec<VPoint> = sol
                .trajectory
                .iter()
                .map(|p| VPoint { s: -p.x, w: p.y, dv: -p.yp })
                .collect();
            pts.reverse();
            out.extend(pts);
        }

        if !fwd.is_empty() {
            let s_last = *fwd.last().unwrap();
            let sol = if s_last > 0.0 {
                integrate(
                    forward_scaled_rhs,
                    OdeState::new(0.0, self.m + 1.0, self.n_star),
                    s_last,
                    &self.params.ode,
                    &[],
                    Sampling::At(fwd),
                )?
                .trajectory
            } else {
                Trajectory { points: alloc::vec![OdeState::new(0.0, self.m + 1.0, self.n_star)] }
            };
            out.extend(
                sol.iter().map(|p| VPoint { s: p.x, w: p.y, dv: -p.yp * libm::exp(3.0 * p.x) }),
            );
        }

        if out.len() != s_points.len() {
            return Err(ShootError::InvalidParams("sample points outside the solution domain"));
        }
        Ok(out)
    }

    /// Shooting-axis `s` at which the solution takes the value `v`
    /// (`V` is strictly decreasing, so it is unique).
    pub fn locate_value(&self, v: f64) -> Result<f64, ShootError> {
        self.locate_offset(v + 1.0)
    }

    /// As [`Self::locate_value`] for `w = V + 1`, which resolves points
    /// close to the equilibrium.
    pub fn locate_offset(&self, w: f64) -> Result<f64, ShootError> {
        let v = w - 1.0;
        let w0 = self.m + 1.0;
        if w == w0 {
            return Ok(0.0);
        }
        if !(w < 0.0) {
            return Err(ShootError::ValueNotAttained { v });
        }
        if w < w0 {
            let ev = [Event::new("value", Crossing::Falling, EventAction::Stop, move |p: &OdeState| {
                p.y - w
            })];
            let sol = integrate(
                forward_scaled_rhs,
                OdeState::new(0.0, w0, self.n_star),
                self.s_end,
                &self.params.ode,
                &ev,
                Sampling::At(&[]),
            )?;
            return sol.stopped_by.map(|h| h.state.x).ok_or(ShootError::ValueNotAttained { v });
        }
        let c = self.continuation;
        let w_match = c.map_or(0.0, |c| c.w_match);
        if c.is_none() || w <= w_match {
            let ev = [Event::new("value", Crossing::Rising, EventAction::Stop, move |p: &OdeState| {
                p.y - w
            })];
            let sol = integrate(
                reversed_rhs,
                OdeState::new(0.0, w0, self.n_star),
                self.params.t_max,
                &self.params.ode,
                &ev,
                Sampling::At(&[]),
            )?;
            return sol.stopped_by.map(|h| -h.state.x).ok_or(ShootError::ValueNotAttained { v });
        }
        let c = c.unwrap();
        let ev = [Event::new("value", Crossing::Falling, EventAction::Stop, move |p: &OdeState| {
            p.y - w
        })];
        let sol = integrate(
            forward_rhs,
            OdeState::new(0.0, -c.delta, -UNSTABLE_RATE * c.delta),
            c.x_cross,
            &tight(&self.params.ode),
            &ev,
            Sampling::At(&[]),
        )?;
        let x = sol.stopped_by.map(|h| h.state.x).ok_or(ShootError::ValueNotAttained { v })?;
        let s = -(c.t_match + c.x_cross - x);
        if s < -self.params.t_max {
            return Err(ShootError::ValueNotAttained { v });
        }
        Ok(s)
    }
}

/// Distance between two solutions after translation: `V_b(s + shift)`
/// against `V_a(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationGap {
    /// `s*` with `V_b(s*) = m_a`.
    pub shift: f64,
    /// `sup |V_a(s) - V_b(s + shift)| / max(1, |V_a(s)|)` over the common domain.
    pub sup_scaled: f64,
    pub s_min: f64,
    pub s_max: f64,
}

/// Compares `a` with `b` shifted so that both take the value `m_a` at `s = 0`.
///
/// `V` grows like `e^{3s}`, so differences are scaled by `max(1, |V|)`.
pub fn translation_gap(a: &ShootingResult, b: &ShootingResult, points: usize) -> Result<TranslationGap, ShootError> {
    if points < 2 {
        return Err(ShootError::InvalidParams("need at least two comparison points"));
    }
    let shift = b.locate_value(a.m)?;
    let s_min = a.s_start().max(b.s_start() - shift);
    let s_max = a.s_end.min(b.s_end - shift);
    if !(s_max > s_min) {
        return Err(ShootError::InvalidParams("solutions share no common domain"));
    }
    let h = (s_max - s_min) / (points - 1) as f64;
    let sa: Vec<f64> = (0..points).map(|i| if i + 1 == points { s_max } else { s_min + i as f64 * h }).collect();
    let sb: Vec<f64> = sa.iter().map(|&s| (s + shift).clamp(b.s_start(), b.s_end)).collect();
    let va = a.sample(&sa)?;
    let vb = b.sample(&sb)?;
    let sup_scaled = va
        .iter()
        .zip(&vb)
        .map(|(p, q)| (p.w - q.w).abs() / p.v().abs().max(1.0))
        .fold(0.0f64, f64::max);
    Ok(TranslationGap { shift, sup_scaled, s_min, s_max })
}
