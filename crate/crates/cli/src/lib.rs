//! Front end for the monopole solver: flag parsing, the `solve`, `sweep` and
//! `verify` subcommands, and deterministic CSV/JSON output.

pub mod config;
pub mod format;
pub mod report;
pub mod sweep;
pub mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use config::{CommandKind, Format, RunConfig};

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const SOLVER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const GATES: i32 = 3;
}

/// Machine-readable error record.
pub fn error_record(kind: &str, message: &str, m: Option<f64>) -> String {
    let v = serde_json::json!({ "error": { "kind": kind, "message": message, "m": m } });
    format::to_json(&v).expect("error record serializes")
}

fn emit(out: Option<&Path>, body: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, body),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

/// `<out>.summary.json` next to the profile file.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// Runs a validated configuration and returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    match cfg.command {
        CommandKind::Solve => run_solve(cfg),
        CommandKind::Sweep => run_sweep(cfg),
        CommandKind::Verify => run_verify(cfg),
    }
}

fn io_failure(e: io::Error) -> i32 {
    eprintln!("{}", error_record("io", &e.to_string(), None));
    exit::SOLVER
}

pub fn run_solve(cfg: &RunConfig) -> i32 {
    let solved = match report::solve(&cfg.shooting, &cfg.model, cfg.grid) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}", error_record("solver", &e.to_string(), Some(e.m())));
            return exit::SOLVER;
        }
    };
    let gates = report::profile_gates(&solved, &cfg.model);
    let body = match cfg.format {
        Format::Csv => report::profile_csv(&solved.profile),
        Format::Json => report::profile_json(&solved.profile),
    };
    if let Err(e) = emit(cfg.out.as_deref(), &body) {
        return io_failure(e);
    }
    let mut summary = format::to_json(&report::summary(cfg, &solved, &gates)).expect("summary serializes");
    summary.push('\n');
    let written = match &cfg.out {
        Some(p) => fs::write(summary_path(p), &summary),
        None => io::stderr().lock().write_all(summary.as_bytes()),
    };
    if let Err(e) = written {
        return io_failure(e);
    }
    for g in gates.iter().filter(|g| !g.passed) {
        eprintln!("gate failed: {}: {}", g.name, g.detail);
    }
    if gates.iter().all(|g| g.passed) {
        exit::OK
    } else {
        exit::GATES
    }
}

pub fn run_sweep(cfg: &RunConfig) -> i32 {
    let rows = match sweep::run(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", error_record("solver", &e.to_string(), Some(e.m())));
            return exit::SOLVER;
        }
    };
    let body = match cfg.format {
        Format::Csv => sweep::to_csv(&rows),
        Format::Json => sweep::to_json(&rows),
    };
    if let Err(e) = emit(cfg.out.as_deref(), &body) {
        return io_failure(e);
    }
    let gate = sweep::monotonicity_gate(&rows);
    if gate.passed {
        exit::OK
    } else {
        eprintln!("gate failed: {}: {}", gate.name, gate.detail);
        exit::GATES
    }
}

pub fn run_verify(cfg: &RunConfig) -> i32 {
    let results = verify::run_battery(cfg);
    let mut text = String::new();
    for c in &results {
        text.push_str(&c.to_string());
        text.push('\n');
    }
    let passed = results.iter().filter(|c| c.passed).count();
    text.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    if let Err(e) = emit(cfg.out.as_deref(), &text) {
        return io_failure(e);
    }
    if passed == results.len() {
        exit::OK
    } else {
        exit::GATES
    }
}
