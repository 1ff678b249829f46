//! Solve pipeline, invariant gates and the JSON summary.

use std::fmt;

use monopole_core::profile::{
    charge_and_energy, fit_far, fit_near, quadrature_disagreement, reconstruct, ExponentFit, FarFits,
    FitWindows, ModelParams, NearFits, Profile, ProfileError,
};
use monopole_core::shooting::{bisect, ShootError, ShootingParams, ShootingResult};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::format::{g17, to_json};

/// Pass thresholds of the gates and acceptance criteria.
pub mod limits {
    pub const K_NEAR_END: f64 = 1e-3;
    pub const U_NEAR_END: f64 = 1e-2;
    pub const K_FAR_END: f64 = 1e-6;
    pub const U_FAR_END: f64 = 1e-3;
    pub const RESIDUAL: f64 = 1e-6;
    pub const QUADRATURE: f64 = 1e-5;
    pub const K_FAR_EXPONENT: (f64, f64) = (3.0, 0.1);
    pub const U_FAR_EXPONENT: (f64, f64) = (-3.0, 0.05);
    pub const K_NEAR_EXPONENT: (f64, f64) = (2.0, 0.05);
    pub const U_NEAR_EXPONENT: (f64, f64) = (1.0, 0.05);
    pub const UNIQUENESS: f64 = 1e-4;
    pub const REPRODUCIBILITY: f64 = 1e-10;
    pub const PROBE_OFFSET: f64 = 1e-8;
    pub const CHARGE: f64 = 1e-3;
    pub const Q_ROUND_TRIP: f64 = 2e-13;
    pub const R_DERIVATIVE: f64 = 1e-6;
    pub const ORDER: (f64, f64) = (4.0, 6.0);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Gate {
    pub fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    pub fn failed(name: &'static str, detail: impl fmt::Display) -> Self {
        Self::new(name, false, detail.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Shooting { m: f64, source: ShootError },
    Profile { m: f64, source: ProfileError },
}

impl SolveError {
    pub fn m(&self) -> f64 {
        match self {
            Self::Shooting { m, .. } | Self::Profile { m, .. } => *m,
        }
    }
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shooting { m, source } => write!(f, "shooting failed for m = {m}: {source}"),
            Self::Profile { m, source } => write!(f, "profile failed for m = {m}: {source}"),
        }
    }
}

impl std::error::Error for SolveError {}

/// A solved and reconstructed profile with its derived reports.
#[derive(Debug, Clone)]
pub struct Solved {
    pub shot: ShootingResult,
    pub profile: Profile,
    pub far: Result<FarFits, ProfileError>,
    pub near: Result<NearFits, ProfileError>,
    pub charge: Result<(f64, f64), ProfileError>,
    pub quadrature_error: f64,
}

pub fn shoot(params: &ShootingParams) -> Result<ShootingResult, SolveError> {
    bisect(params).map_err(|source| SolveError::Shooting { m: params.m, source })
}

/// bracket, bisect, stitch, normalize, reconstruct, residuals, fit.
pub fn solve(params: &ShootingParams, model: &ModelParams, grid: usize) -> Result<Solved, SolveError> {
    let shot = shoot(params)?;
    let profile =
        reconstruct(&shot, model, grid).map_err(|source| SolveError::Profile { m: params.m, source })?;
    Ok(Solved {
        far: fit_far(&profile, &FitWindows::default()),
        near: fit_near(&profile, &FitWindows::default()),
        charge: charge_and_energy(&profile, model),
        quadrature_error: quadrature_disagreement(&profile),
        shot,
        profile,
    })
}

fn within(x: f64, (center, tol): (f64, f64)) -> bool {
    (x - center).abs() <= tol
}

fn e3(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn boundary_gate(s: &Solved) -> Gate {
    use limits::*;
    let first = s.profile.samples[0];
    let last = *s.profile.samples.last().expect("non-empty profile");
    let dk0 = (first.k - 1.0).abs();
    let du1 = last.one_minus_u.abs();
    let near = dk0 < K_NEAR_END && first.u < U_NEAR_END;
    let far_k = last.k < K_FAR_END;
    let far_u = du1 < U_FAR_END;
    let mut detail = format!(
        "r={}: |K-1|={} U={}; r={}: K={} |U-1|={}",
        e3(first.r),
        e3(dk0),
        e3(first.u),
        e3(last.r),
        e3(last.k),
        e3(du1)
    );
    if !far_u {
        detail.push_str(&format!(
            "; tail not converged: |U-1| at the far end exceeds {}, increase --s-max",
            e3(U_FAR_END)
        ));
    }
    Gate::new("boundary", near && far_k && far_u, detail)
}

pub fn residual_gate(s: &Solved) -> Gate {
    let (r1, r2) = s.profile.residual_max();
    let ok = r1 < limits::RESIDUAL && r2 < limits::RESIDUAL && s.quadrature_error < limits::QUADRATURE;
    Gate::new(
        "residuals",
        ok,
        format!("max res_eq1={} res_eq2={} sup|U_alg-U_quad|={}", e3(r1), e3(r2), e3(s.quadrature_error)),
    )
}

pub fn monotonicity_gate(s: &Solved) -> Gate {
    let (k_bad, u_bad) = s.profile.monotonicity_violations();
    Gate::new(
        "monotonicity",
        k_bad == 0 && u_bad == 0,
        format!("{} pairs: K violations={k_bad} U violations={u_bad}", s.profile.len() - 1),
    )
}

fn fit_detail(name: &str, f: &ExponentFit) -> String {
    format!(
        "{name}={:.6} (tau {}..{}, {} pts, rms {})",
        f.exponent,
        e3(f.tau_min),
        e3(f.tau_max),
        f.n_points,
        e3(f.rms_residual)
    )
}

pub fn far_gate(s: &Solved) -> Gate {
    match &s.far {
        Ok(a) => Gate::new(
            "far asymptotics",
            within(a.k.exponent, limits::K_FAR_EXPONENT) && within(a.u.exponent, limits::U_FAR_EXPONENT),
            format!(
                "{}; C={:.6}; {}",
                fit_detail("slope ln(-ln K)", &a.k),
                a.c_est,
                fit_detail("slope ln(1-U)", &a.u)
            ),
        ),
        Err(e) => Gate::failed("far asymptotics", e),
    }
}

pub fn near_gate(s: &Solved) -> Gate {
    match &s.near {
        Ok(a) => Gate::new(
            "near asymptotics",
            within(a.k.exponent, limits::K_NEAR_EXPONENT) && within(a.u.exponent, limits::U_NEAR_EXPONENT),
            format!("{}; {}", fit_detail("slope ln(1-K)", &a.k), fit_detail("slope ln U", &a.u)),
        ),
        Err(e) => Gate::failed("near asymptotics", e),
    }
}

pub fn charge_gate(s: &Solved, model: &ModelParams) -> Gate {
    match s.charge {
        Ok((psi, energy)) => {
            let unit = monopole_core::profile::saturated_energy(model, 1.0);
            let ok = (psi - 1.0).abs() <= limits::CHARGE && ((energy - unit) / unit).abs() <= limits::CHARGE;
            Gate::new("charge and energy", ok, format!("Psi={:.12} E={:.10} (16pi^2 H0/g^2={:.10})", psi, energy, unit))
        }
        Err(e) => Gate::failed("charge and energy", e),
    }
}

/// Gates checked by `solve`.
pub fn profile_gates(s: &Solved, model: &ModelParams) -> Vec<Gate> {
    vec![
        boundary_gate(s),
        residual_gate(s),
        monotonicity_gate(s),
        far_gate(s),
        near_gate(s),
        charge_gate(s, model),
    ]
}

fn fit_json(f: &ExponentFit) -> Value {
    json!({
        "exponent": f.exponent,
        "intercept": f.intercept,
        "rms_residual": f.rms_residual,
        "n_points": f.n_points,
        "tau_min": f.tau_min,
        "tau_max": f.tau_max,
    })
}

pub fn params_json(cfg: &RunConfig, m: f64) -> Value {
    let p = cfg.shooting_for(m);
    json!({
        "m": m,
        "g": cfg.model.g,
        "h0": cfg.model.h0,
        "a": cfg.model.a,
        "grid": cfg.grid,
        "ode_rel_tol": p.ode.rel_tol,
        "ode_abs_tol": p.ode.abs_tol,
        "shoot_tol": p.bisect_tol,
        "t_max": p.t_max,
        "s_max": p.s_max,
    })
}

pub fn shooting_json(r: &ShootingResult) -> Value {
    json!({
        "n_star": r.n_star,
        "sigma_inf": r.sigma_inf,
        "s0": r.s0,
        "bracket_width": r.bracket_width,
        "iterations": r.iterations,
        "s_end": r.s_end,
        "t_match": r.continuation.map(|c| c.t_match),
        "stitch_mismatch": r.stitch_mismatch,
    })
}

/// Summary document with the top-level keys
/// `params, shooting, asymptotics, charge_energy, residual_max, gates`.
pub fn summary(cfg: &RunConfig, s: &Solved, gates: &[Gate]) -> Value {
    let far = match &s.far {
        Ok(a) => json!({ "k": fit_json(&a.k), "c_est": a.c_est, "u": fit_json(&a.u) }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let near = match &s.near {
        Ok(a) => json!({ "k": fit_json(&a.k), "u": fit_json(&a.u) }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let asymptotics = json!({ "far": far, "near": near });
    let charge_energy = match s.charge {
        Ok((psi, energy)) => json!({ "psi": psi, "energy": energy }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let (r1, r2) = s.profile.residual_max();
    json!({
        "params": params_json(cfg, s.shot.m),
        "shooting": shooting_json(&s.shot),
        "asymptotics": asymptotics,
        "charge_energy": charge_energy,
        "residual_max": { "eq1": r1, "eq2": r2, "quadrature": s.quadrature_error },
        "gates": gates,
    })
}

pub const CSV_HEADER: &str = "s,tau,r,K,U,res_eq1,res_eq2";

pub fn profile_csv(p: &Profile) -> String {
    let mut out = String::with_capacity(p.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, q) in p.samples.iter().enumerate() {
        let row = [q.s, q.tau, q.r, q.k, q.u, p.res_eq1[i], p.res_eq2[i]];
        let cells: Vec<String> = row.iter().map(|&x| g17(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Row {
    s: f64,
    tau: f64,
    r: f64,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "U")]
    u: f64,
    res_eq1: f64,
    res_eq2: f64,
}

pub fn profile_json(p: &Profile) -> String {
    let rows: Vec<Row> = p
        .samples
        .iter()
        .enumerate()
        .map(|(i, q)| Row { s: q.s, tau: q.tau, r: q.r, k: q.k, u: q.u, res_eq1: p.res_eq1[i], res_eq2: p.res_eq2[i] })
        .collect();
    let mut s = to_json(&rows).expect("rows serialize");
    s.push('\n');
    s
}
