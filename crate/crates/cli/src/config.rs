//! Command-line flags and their validation.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monopole_core::integrator::IntegratorConfig;
use monopole_core::profile::{ModelParams, MIN_GRID};
use monopole_core::shooting::ShootingParams;

#[derive(Debug, Parser)]
#[command(name = "monopole", version, about = "Radial profiles of the generalized SO(5) monopole in six dimensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Sweep,
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for one starting value and write the profile table.
    Solve(Flags),
    /// Solve for every value of --m-list and tabulate the shooting slopes.
    Sweep(Flags),
    /// Run the acceptance battery and print one line per criterion.
    Verify(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Starting value V(0) = m, below -1.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Comma separated starting values for sweep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub m_list: Option<Vec<f64>>,
    /// Gauge coupling.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub g: f64,
    /// Higgs vacuum value.
    #[arg(long = "h0", default_value_t = 1.0, allow_hyphen_values = true)]
    pub h0: f64,
    /// Number of uniform points in s for the profile.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    #[arg(long = "ode-rel-tol", alias = "ode-tol", default_value_t = 1e-10)]
    pub ode_rel_tol: f64,
    #[arg(long = "ode-abs-tol", default_value_t = 1e-12)]
    pub ode_abs_tol: f64,
    /// Bisection width on the shooting slope.
    #[arg(long = "shoot-tol", default_value_t = 1e-12)]
    pub shoot_tol: f64,
    /// Horizon of the reversed problem.
    #[arg(long = "t-max", default_value_t = 12.0)]
    pub t_max: f64,
    /// Horizon of the forward problem; the |V| guard usually stops first.
    #[arg(long = "s-max", default_value_t = 12.0)]
    pub s_max: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output path for the profile or sweep table (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_M: f64 = -2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: ModelParams,
    /// Shooting parameters; `m` holds the single-solve value.
    pub shooting: ShootingParams,
    pub m_list: Vec<f64>,
    pub grid: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let (kind, flags) = match cli.command {
            Command::Solve(f) => (CommandKind::Solve, f),
            Command::Sweep(f) => (CommandKind::Sweep, f),
            Command::Verify(f) => (CommandKind::Verify, f),
        };
        Self::from_flags(kind, flags)
    }

    pub fn from_flags(command: CommandKind, f: Flags) -> Result<Self, ConfigError> {
        let err = |msg: String| Err(ConfigError(msg));
        let model = ModelParams::new(f.g, f.h0).map_err(|e| ConfigError(e.to_string()))?;
        if f.grid < MIN_GRID {
            return err(format!("--grid must be at least {MIN_GRID}, got {}", f.grid));
        }
        let m_list = match (command, &f.m_list, f.m) {
            (CommandKind::Sweep, Some(list), None) => list.clone(),
            (CommandKind::Sweep, None, Some(m)) => vec![m],
            (CommandKind::Sweep, Some(_), Some(_)) => return err("give either --m or --m-list, not both".into()),
            (CommandKind::Sweep, None, None) => return err("sweep needs --m-list".into()),
            (_, Some(_), _) => return err("--m-list is only accepted by sweep".into()),
            (_, None, m) => vec![m.unwrap_or(DEFAULT_M)],
        };
        if m_list.is_empty() {
            return err("--m-list is empty".into());
        }
        for &m in &m_list {
            if !(m < -1.0 && m.is_finite()) {
                return err(format!("m must be a finite value below -1, got {m}"));
            }
        }
        for (name, v) in [
            ("--ode-rel-tol", f.ode_rel_tol),
            ("--ode-abs-tol", f.ode_abs_tol),
            ("--shoot-tol", f.shoot_tol),
            ("--t-max", f.t_max),
            ("--s-max", f.s_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return err(format!("{name} must be positive, got {v}"));
            }
        }
        let mut shooting = ShootingParams::new(m_list[0]);
        shooting.ode = IntegratorConfig { rel_tol: f.ode_rel_tol, abs_tol: f.ode_abs_tol, ..Default::default() };
        shooting.bisect_tol = f.shoot_tol;
        shooting.t_max = f.t_max;
        shooting.s_max = f.s_max;
        shooting.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(Self { command, model, shooting, m_list, grid: f.grid, format: f.format, out: f.out })
    }

    /// Shooting parameters for another starting value.
    pub fn shooting_for(&self, m: f64) -> ShootingParams {
        ShootingParams { m, ..self.shooting }
    }

    /// Defaults of `verify` with `m = -2`, `g = H0 = 1`.
    pub fn defaults(command: CommandKind) -> Self {
        let cli = Cli::parse_from(["monopole", "verify"]);
        let Command::Verify(flags) = cli.command else { unreachable!() };
        Self::from_flags(command, flags).expect("defaults are valid")
    }
}
