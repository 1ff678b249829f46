//! Concurrent solves over a list of starting values.

use std::thread;

use monopole_core::shooting::ShootingResult;

use crate::config::RunConfig;
use crate::format::g17;
use crate::report::{shoot, Gate, SolveError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub m: f64,
    pub n_star: f64,
    pub sigma_inf: f64,
    pub s0: f64,
}

impl From<&ShootingResult> for SweepRow {
    fn from(r: &ShootingResult) -> Self {
        Self { m: r.m, n_star: r.n_star, sigma_inf: r.sigma_inf, s0: r.s0 }
    }
}

/// Solves every `m` of the list, in parallel, keeping the input order.
pub fn run(cfg: &RunConfig) -> Result<Vec<SweepRow>, SolveError> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(cfg.m_list.len()).max(1);
    let chunk = cfg.m_list.len().div_ceil(workers);
    let results: Vec<Result<SweepRow, SolveError>> = thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .m_list
            .chunks(chunk)
            .map(|ms| {
                scope.spawn(move || {
                    ms.iter().map(|&m| shoot(&cfg.shooting_for(m)).map(|r| SweepRow::from(&r))).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    results.into_iter().collect()
}

/// `n*` must grow strictly as `m` decreases; equal `m` must give equal `n*`.
pub fn monotonicity_gate(rows: &[SweepRow]) -> Gate {
    let mut bad = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let ok = if a.m == b.m {
                (a.n_star - b.n_star).abs() <= 1e-10
            } else {
                (a.m < b.m) == (a.n_star > b.n_star)
            };
            if !ok {
                bad.push(format!("(m={}, n*={}) vs (m={}, n*={})", a.m, a.n_star, b.m, b.n_star));
            }
        }
    }
    if bad.is_empty() {
        Gate::new("sweep monotonicity", true, format!("{} rows consistent", rows.len()))
    } else {
        Gate::new("sweep monotonicity", false, bad.join("; "))
    }
}

pub const HEADER: &str = "m,n_star,sigma_inf,s0";

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", g17(r.m), g17(r.n_star), g17(r.sigma_inf), g17(r.s0)));
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    let v: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| serde_json::json!({"m": r.m, "n_star": r.n_star, "sigma_inf": r.sigma_inf, "s0": r.s0}))
        .collect();
    let mut s = crate::format::to_json(&v).expect("rows serialize");
    s.push('\n');
    s
}
