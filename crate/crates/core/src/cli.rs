//! Run configuration, parsing, and mode dispatch for the `planar-qdot`
//! binary.
//!
//! The config file is flat `key = value` lines; `#` starts a comment.
//! Command-line flags carry the same keys and are applied after the file.
//! Everything is validated before any output is written.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::eigensolver::{default_bound_range, EigenResult, MatchStrategy, Shooter, SolverConfig};
use crate::error::Error;
use crate::numerov::RadialGrid;
use crate::potentials::{EffectiveProblem, PotentialKind, PotentialSpec};
use crate::scenarios::{
    chern_simons_hydrogen, chern_simons_mass_scale, csv_number, cutoff_sensitivity_scan,
    emit_figure_data, run_ground_state_comparison, select_reproduction_row, six_digits,
    write_cutoff_table, CutoffRow, GridJson, MIN_SCREENING_LENGTHS, TARGET_E_CHERN_SIMONS,
};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const NO_CONVERGENCE: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const IO: u8 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Compare,
    CutoffScan,
    ChernSimons,
    OscillatorCheck,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Compare => "compare",
            Mode::CutoffScan => "cutoff-scan",
            Mode::ChernSimons => "chern-simons",
            Mode::OscillatorCheck => "oscillator-check",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "solve" => Ok(Mode::Solve),
            "compare" => Ok(Mode::Compare),
            "cutoff-scan" => Ok(Mode::CutoffScan),
            "chern-simons" => Ok(Mode::ChernSimons),
            "oscillator-check" => Ok(Mode::OscillatorCheck),
            other => Err(format!(
                "unknown mode `{other}` (expected solve, compare, cutoff-scan, chern-simons or \
                 oscillator-check)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub potential: PotentialKind,
    pub strength: f64,
    pub mass_scale: f64,
    pub omega: f64,
    pub l: i32,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub energy_tol: f64,
    pub max_iter: usize,
    pub scan_points: usize,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
    pub output_dir: PathBuf,
    pub r_min_list: Vec<f64>,
    pub mass_ratio: f64,
    pub target_eta: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Solve,
            potential: PotentialKind::InverseR,
            strength: 1.0,
            mass_scale: 1.0,
            omega: 0.01,
            l: 0,
            r_min: 0.01,
            r_max: 60.0,
            points: 240_001,
            energy_tol: 1e-10,
            max_iter: 200,
            scan_points: 400,
            eta_min: None,
            eta_max: None,
            output_dir: PathBuf::from("out"),
            r_min_list: Vec::new(),
            mass_ratio: 1e-5,
            target_eta: None,
        }
    }
}

/// Every key the config file and the flags accept.
pub const KEYS: [&str; 18] = [
    "mode",
    "potential",
    "strength",
    "mass_scale",
    "omega",
    "l",
    "r_min",
    "r_max",
    "points",
    "energy_tol",
    "max_iter",
    "scan_points",
    "eta_min",
    "eta_max",
    "output_dir",
    "r_min_list",
    "mass_ratio",
    "target_eta",
];

/// Where a setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Line(usize),
    Flag,
    Validation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub source: Source,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source {
            Source::Line(n) => write!(f, "config line {n}: `{}`: {}", self.key, self.message),
            Source::Flag => write!(f, "flag --{}: {}", self.key.replace('_', "-"), self.message),
            Source::Validation => write!(f, "config `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_value<T: FromStr>(key: &str, value: &str, source: Source) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError {
        key: key.to_string(),
        source,
        message: format!("cannot parse `{value}`: {e}"),
    })
}

fn parse_list(key: &str, value: &str, source: Source) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s, source))
        .collect()
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str, source: Source) -> Result<(), ConfigError> {
        let opt = |v: &str| -> Result<Option<f64>, ConfigError> {
            if v.is_empty() || v == "none" {
                Ok(None)
            } else {
                parse_value(key, v, source).map(Some)
            }
        };
        match key {
            "mode" => self.mode = parse_value(key, value, source)?,
            "potential" => self.potential = parse_value(key, value, source)?,
            "strength" => self.strength = parse_value(key, value, source)?,
            "mass_scale" => self.mass_scale = parse_value(key, value, source)?,
            "omega" => self.omega = parse_value(key, value, source)?,
            "l" => self.l = parse_value(key, value, source)?,
            "r_min" => self.r_min = parse_value(key, value, source)?,
            "r_max" => self.r_max = parse_value(key, value, source)?,
            "points" => self.points = parse_value(key, value, source)?,
            "energy_tol" => self.energy_tol = parse_value(key, value, source)?,
            "max_iter" => self.max_iter = parse_value(key, value, source)?,
            "scan_points" => self.scan_points = parse_value(key, value, source)?,
            "eta_min" => self.eta_min = opt(value)?,
            "eta_max" => self.eta_max = opt(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "r_min_list" => self.r_min_list = parse_list(key, value, source)?,
            "mass_ratio" => self.mass_ratio = parse_value(key, value, source)?,
            "target_eta" => self.target_eta = opt(value)?,
            _ => {
                return Err(ConfigError {
                    key: key.to_string(),
                    source,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<RadialGrid, Error> {
        RadialGrid::new(self.r_min, self.r_max, self.points)
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            match_strategy: MatchStrategy::OutermostTurningPoint,
            energy_tol: self.energy_tol,
            max_iter: self.max_iter,
            scan_points: self.scan_points,
        }
    }

    pub fn potential_spec(&self) -> PotentialSpec {
        PotentialSpec {
            kind: self.potential,
            strength: self.strength,
            mass_scale: self.mass_scale,
        }
    }

    pub fn problem(&self) -> Result<EffectiveProblem, Error> {
        EffectiveProblem::new(self.potential_spec(), self.omega, self.l)
    }

    /// Checks every precondition of the selected mode.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, message: String| ConfigError {
            key: key.to_string(),
            source: Source::Validation,
            message,
        };
        let lift = |e: Error| match e {
            Error::Config { field, reason } => invalid(field, reason),
            Error::Domain { what, value } => invalid("config", format!("{what} (got {value})")),
            other => invalid("config", other.to_string()),
        };
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(invalid("omega", format!("omega must be >= 0, got {}", self.omega)));
        }
        let grid = self.grid().map_err(lift)?;
        self.solver().validate().map_err(lift)?;
        match self.mode {
            Mode::Solve | Mode::CutoffScan => {
                self.problem().map_err(lift)?;
            }
            Mode::Compare | Mode::OscillatorCheck => {
                if self.omega <= 0.0 {
                    return Err(invalid("omega", format!("{} needs omega > 0", self.mode.label())));
                }
            }
            Mode::ChernSimons => {
                if !(self.mass_ratio.is_finite() && self.mass_ratio > 0.0) {
                    return Err(invalid(
                        "mass_ratio",
                        format!("must be > 0, got {}", self.mass_ratio),
                    ));
                }
                let kappa = chern_simons_mass_scale(self.mass_ratio);
                if grid.r_max() * kappa < MIN_SCREENING_LENGTHS {
                    return Err(invalid(
                        "r_max",
                        format!(
                            "must be >= {:.4e} bohr ({MIN_SCREENING_LENGTHS} screening lengths \
                             1/kappa for mass_ratio {})",
                            MIN_SCREENING_LENGTHS / kappa,
                            self.mass_ratio
                        ),
                    ));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.eta_min, self.eta_max) {
            if !(lo < hi) {
                return Err(invalid("eta_max", format!("need eta_min < eta_max, got [{lo}, {hi}]")));
            }
        }
        if self.mode == Mode::CutoffScan {
            if self.r_min_list.is_empty() {
                return Err(invalid("r_min_list", "cutoff-scan needs at least one r_min".into()));
            }
            if let Some(bad) = self.r_min_list.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
                return Err(invalid("r_min_list", format!("every cutoff must be > 0, got {bad}")));
            }
            let l = &self.r_min_list;
            let monotone = l.windows(2).all(|w| w[0] < w[1]) || l.windows(2).all(|w| w[0] > w[1]);
            if !monotone {
                return Err(invalid(
                    "r_min_list",
                    "cutoffs must be strictly increasing or strictly decreasing".into(),
                ));
            }
            if let Some(bad) = self.r_min_list.iter().find(|r| **r >= self.r_max) {
                return Err(invalid("r_min_list", format!("cutoff {bad} is not below r_max")));
            }
        }
        Ok(())
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn to_config_text(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_else(|| "none".into());
        let list = self
            .r_min_list
            .iter()
            .map(|r| format!("{r:e}"))
            .collect::<Vec<_>>()
            .join(",");
        let mut s = String::new();
        for (k, v) in [
            ("mode", self.mode.label().to_string()),
            ("potential", self.potential.label().to_string()),
            ("strength", format!("{:e}", self.strength)),
            ("mass_scale", format!("{:e}", self.mass_scale)),
            ("omega", format!("{:e}", self.omega)),
            ("l", self.l.to_string()),
            ("r_min", format!("{:e}", self.r_min)),
            ("r_max", format!("{:e}", self.r_max)),
            ("points", self.points.to_string()),
            ("energy_tol", format!("{:e}", self.energy_tol)),
            ("max_iter", self.max_iter.to_string()),
            ("scan_points", self.scan_points.to_string()),
            ("eta_min", opt(self.eta_min)),
            ("eta_max", opt(self.eta_max)),
            ("output_dir", self.output_dir.display().to_string()),
            ("r_min_list", list),
            ("mass_ratio", format!("{:e}", self.mass_ratio)),
            ("target_eta", opt(self.target_eta)),
        ] {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

/// File contents first, then `(key, value)` overrides; validated.
pub fn parse_config(
    file_contents: &str,
    flag_overrides: &[(String, String)],
) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (index, raw) in file_contents.lines().enumerate() {
        let source = Source::Line(index + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError {
                key: line.to_string(),
                source,
                message: "expected `key = value`".into(),
            });
        };
        let key = key.trim();
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError {
                key: key.to_string(),
                source,
                message: format!("`{key}` is set more than once"),
            });
        }
        config.set(key, value.trim(), source)?;
        seen.push(key.to_string());
    }
    for (key, value) in flag_overrides {
        config.set(key, value.trim(), Source::Flag)?;
    }
    config.validate()?;
    Ok(config)
}

/// Failure of a run, with its exit code.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    NoState(String),
    Convergence(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => exit::CONFIG,
            RunError::NoState(_) | RunError::Convergence(_) => exit::NO_CONVERGENCE,
            RunError::Io(_) => exit::IO,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::NoState(m) => write!(f, "{m}"),
            RunError::Convergence(m) => write!(f, "solver error: {m}"),
            RunError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Domain { .. } | Error::GridTooSmall { .. } | Error::OutOfRange { .. } => {
                RunError::Config(e.to_string())
            }
            Error::Io(_) | Error::Json(_) => RunError::Io(e.to_string()),
            Error::IntegratorFault { .. }
            | Error::Propagation { .. }
            | Error::NoConvergence { .. }
            | Error::InvalidBracket { .. }
            | Error::ZeroNorm => RunError::Convergence(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.to_string())
    }
}

const NO_STATE: &str = "no bound state in range";

/// Runs the configured mode, printing the summary to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), RunError> {
    config.validate()?;
    let grid = config.grid()?;
    match config.mode {
        Mode::Solve => run_solve(config, &grid, out),
        Mode::Compare => run_compare(config, &grid, out),
        Mode::CutoffScan => run_cutoff_scan(config, &grid, out),
        Mode::ChernSimons => run_chern_simons(config, &grid, out),
        Mode::OscillatorCheck => run_oscillator_check(config, &grid, out),
    }
}

/// Exit code of [`run`].
pub fn run_to_exit_code(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match run(config, out) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn create_output_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

fn print_grid(out: &mut dyn Write, grid: &RadialGrid) -> Result<(), RunError> {
    writeln!(
        out,
        "grid: r_min = {:e}, r_max = {:e}, points = {}, h = {:e}",
        grid.r_min(),
        grid.r_max(),
        grid.n(),
        grid.h()
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SolveJson<'a> {
    mode: &'static str,
    states: Vec<StateJson>,
    provenance: SolveProvenance<'a>,
}

#[derive(Serialize)]
struct StateJson {
    eta: f64,
    nodes: usize,
    residual: f64,
    iterations: usize,
    matching_radius: f64,
}

#[derive(Serialize)]
struct SolveProvenance<'a> {
    energy_unit: &'static str,
    grid: GridJson,
    problem: &'a EffectiveProblem,
    solver: SolverConfig,
    eta_range: (f64, f64),
    crate_version: &'static str,
}

fn state_json(s: &EigenResult) -> StateJson {
    StateJson {
        eta: six_digits(s.eta),
        nodes: s.nodes,
        residual: six_digits(s.residual),
        iterations: s.iterations,
        matching_radius: six_digits(s.grid_echo.matching_radius),
    }
}

fn run_solve(config: &RunConfig, grid: &RadialGrid, out: &mut dyn Write) -> Result<(), RunError> {
    let problem = config.problem()?;
    let solver = config.solver();
    let default = default_bound_range(&problem, grid)?;
    let lo = config.eta_min.or(default.map(|d| d.0));
    let hi = config.eta_max.or(default.map(|d| d.1));
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(RunError::NoState(format!(
            "{NO_STATE}: V_eff has no negative-energy window on this grid; set eta_min/eta_max"
        )));
    };
    if !(lo < hi) {
        return Err(RunError::NoState(format!("{NO_STATE} [{lo:e}, {hi:e}]")));
    }
    let shooter = Shooter::new(&problem, grid, &solver)?;
    let brackets = shooter.bracket_states(lo, hi)?;
    if brackets.is_empty() {
        return Err(RunError::NoState(format!("{NO_STATE} [{lo:e}, {hi:e}]")));
    }
    let states = brackets
        .iter()
        .map(|b| shooter.solve_state(b))
        .collect::<Result<Vec<_>, _>>()?;

    create_output_dir(&config.output_dir)?;
    let mut table = String::from("index,eta,nodes,residual,iterations\n");
    for (k, s) in states.iter().enumerate() {
        table.push_str(&format!(
            "{k},{},{},{},{}\n",
            csv_number(s.eta),
            s.nodes,
            csv_number(s.residual),
            s.iterations
        ));
    }
    write_file(&config.output_dir.join("states.csv"), &table)?;

    let mut wf = String::from("r");
    for k in 0..states.len() {
        wf.push_str(&format!(",u_{k}"));
    }
    wf.push('\n');
    for i in 0..grid.n() {
        wf.push_str(&csv_number(grid.radius(i)));
        for s in &states {
            wf.push(',');
            wf.push_str(&csv_number(s.wavefunction.samples[i]));
        }
        wf.push('\n');
    }
    write_file(&config.output_dir.join("wavefunctions.csv"), &wf)?;

    let json = SolveJson {
        mode: "solve",
        states: states.iter().map(state_json).collect(),
        provenance: SolveProvenance {
            energy_unit: "hartree",
            grid: grid.into(),
            problem: &problem,
            solver,
            eta_range: (lo, hi),
            crate_version: env!("CARGO_PKG_VERSION"),
        },
    };
    let text = serde_json::to_string_pretty(&json).map_err(|e| RunError::Io(e.to_string()))? + "\n";
    write_file(&config.output_dir.join("solve.json"), &text)?;

    writeln!(
        out,
        "solve: {} l = {} omega = {:e}, eta in [{lo:e}, {hi:e}]",
        problem.potential.kind.label(),
        problem.l,
        problem.omega
    )?;
    print_grid(out, grid)?;
    for s in &states {
        writeln!(
            out,
            "  eta = {:.10e} Ha  nodes = {}  residual = {:.3e}  iterations = {}",
            s.eta, s.nodes, s.residual, s.iterations
        )?;
    }
    Ok(())
}

fn run_compare(config: &RunConfig, grid: &RadialGrid, out: &mut dyn Write) -> Result<(), RunError> {
    let solver = config.solver();
    let mut report = run_ground_state_comparison(config.omega, grid, &solver)?;
    if !config.r_min_list.is_empty() {
        let inv = EffectiveProblem::new(PotentialSpec::inverse_r(1.0), config.omega, 0)?;
        report.cutoff_table = Some(cutoff_sensitivity_scan(&inv, &config.r_min_list, grid, &solver)?);
    }
    for outcome in [&report.inverse_r, &report.log_r] {
        if let Some(e) = &outcome.error {
            return Err(RunError::Convergence(format!(
                "{}: {e}",
                outcome.problem.potential.kind.label()
            )));
        }
        if outcome.ground.is_none() {
            return Err(RunError::NoState(format!(
                "{NO_STATE} for {}",
                outcome.problem.potential.kind.label()
            )));
        }
    }
    create_output_dir(&config.output_dir)?;
    let files = emit_figure_data(&report, &config.output_dir)?;
    if let Some(table) = &report.cutoff_table {
        write_cutoff_table(table, &config.output_dir.join("cutoff_table.csv"))?;
    }

    writeln!(out, "compare: l = 0, omega = {:e}", config.omega)?;
    print_grid(out, grid)?;
    for outcome in [&report.inverse_r, &report.log_r] {
        let g = outcome.ground.as_ref().expect("checked above");
        writeln!(
            out,
            "  {:<10} eta = {:.10e} Ha  nodes = {}  negative-energy states = {}",
            outcome.problem.potential.kind.label(),
            g.eta,
            g.nodes,
            outcome.negative_brackets
        )?;
    }
    match report.ratio_ln_over_inv {
        Some(r) => writeln!(out, "  |E_ln| / |E_inv| = {r:.6}")?,
        None => writeln!(out, "  |E_ln| / |E_inv| = absent")?,
    }
    if let Some(m) = report.hydrogen_multiple {
        writeln!(out, "  |E_ln| / 0.5 = {m:.6}")?;
    }
    for f in &report.findings {
        writeln!(out, "  finding: {f}")?;
    }
    writeln!(out, "  wrote {}", files.report.display())?;
    Ok(())
}

fn run_cutoff_scan(config: &RunConfig, grid: &RadialGrid, out: &mut dyn Write) -> Result<(), RunError> {
    let problem = config.problem()?;
    let rows = cutoff_sensitivity_scan(&problem, &config.r_min_list, grid, &config.solver())?;
    create_output_dir(&config.output_dir)?;
    write_cutoff_table(&rows, &config.output_dir.join("cutoff_table.csv"))?;

    writeln!(
        out,
        "cutoff-scan: {} l = {} omega = {:e}, h = {:e}, r_max = {:e}",
        problem.potential.kind.label(),
        problem.l,
        problem.omega,
        grid.h(),
        grid.r_max()
    )?;
    for row in &rows {
        match (row.eta, &row.error) {
            (Some(e), _) => writeln!(out, "  r_min = {:e}  eta = {e:.10e} Ha", row.r_min)?,
            (None, Some(err)) => writeln!(out, "  r_min = {:e}  failed: {err}", row.r_min)?,
            (None, None) => writeln!(out, "  r_min = {:e}  no state", row.r_min)?,
        }
    }
    if let Some(target) = config.target_eta {
        let Some(best) = select_reproduction_row(&rows, target) else {
            return Err(RunError::NoState(format!("{NO_STATE} for any cutoff")));
        };
        let frozen = frozen_config(config, best);
        write_file(&config.output_dir.join("frozen.cfg"), &frozen.to_config_text())?;
        writeln!(
            out,
            "  closest to target {target:e}: r_min = {:e} (eta = {:.10e}); wrote frozen.cfg",
            best.r_min,
            best.eta.expect("selected rows have an energy")
        )?;
    }
    if rows.iter().all(|r| r.eta.is_none()) {
        return Err(RunError::NoState(format!("{NO_STATE} for any cutoff")));
    }
    Ok(())
}

/// Compare-mode config on the grid of a selected cutoff row.
pub fn frozen_config(config: &RunConfig, row: &CutoffRow) -> RunConfig {
    RunConfig {
        mode: Mode::Compare,
        r_min: row.r_min,
        r_max: row.r_max,
        points: row.points,
        target_eta: None,
        ..config.clone()
    }
}

#[derive(Serialize)]
struct ChernSimonsJson {
    mode: &'static str,
    eta: Option<f64>,
    nodes: Option<usize>,
    target_eta: f64,
    factor_from_target: Option<f64>,
    mass_ratio: f64,
    kappa: f64,
    strength: f64,
    sign_convention: &'static str,
    grid: GridJson,
    solver: SolverConfig,
}

const CS_SIGN_NOTE: &str = "V(r) = -K0(kappa r)/(2 pi), attractive; kappa = mass_ratio * c in bohr^-1";

fn run_chern_simons(config: &RunConfig, grid: &RadialGrid, out: &mut dyn Write) -> Result<(), RunError> {
    let solver = config.solver();
    let state = chern_simons_hydrogen(config.mass_ratio, grid, &solver)?;
    let kappa = chern_simons_mass_scale(config.mass_ratio);
    create_output_dir(&config.output_dir)?;
    let json = ChernSimonsJson {
        mode: "chern-simons",
        eta: state.as_ref().map(|s| six_digits(s.eta)),
        nodes: state.as_ref().map(|s| s.nodes),
        target_eta: TARGET_E_CHERN_SIMONS,
        factor_from_target: state.as_ref().map(|s| six_digits(s.eta / TARGET_E_CHERN_SIMONS)),
        mass_ratio: config.mass_ratio,
        kappa,
        strength: crate::potentials::CHERN_SIMONS_STRENGTH,
        sign_convention: CS_SIGN_NOTE,
        grid: grid.into(),
        solver,
    };
    let text = serde_json::to_string_pretty(&json).map_err(|e| RunError::Io(e.to_string()))? + "\n";
    write_file(&config.output_dir.join("chern_simons.json"), &text)?;

    writeln!(out, "chern-simons: mass_ratio = {:e}, kappa = {kappa:e} bohr^-1", config.mass_ratio)?;
    writeln!(out, "  {CS_SIGN_NOTE}")?;
    print_grid(out, grid)?;
    let Some(s) = state else {
        return Err(RunError::NoState(NO_STATE.into()));
    };
    writeln!(
        out,
        "  eta = {:.10e} Ha  nodes = {}  ({:.4e} times the target {TARGET_E_CHERN_SIMONS:e})",
        s.eta,
        s.nodes,
        s.eta / TARGET_E_CHERN_SIMONS
    )?;
    Ok(())
}

/// Levels checked by `oscillator-check`.
pub const OSCILLATOR_LS: [i32; 3] = [0, 1, 2];
pub const OSCILLATOR_LEVELS: usize = 3;
pub const OSCILLATOR_TOL: f64 = 1e-8;

/// `2ω(2n + |l| + 1)`.
pub fn oscillator_level(omega: f64, n: usize, l: i32) -> f64 {
    2.0 * omega * (2.0 * n as f64 + f64::from(l.unsigned_abs()) + 1.0)
}

/// Lowest `OSCILLATOR_LEVELS` levels of the bare oscillator for angular
/// momentum `l`, as `(n, exact, computed, nodes)`.
pub fn oscillator_levels(
    omega: f64,
    l: i32,
    grid: &RadialGrid,
    solver: &SolverConfig,
) -> Result<Vec<(usize, f64, f64, usize)>, Error> {
    let problem = EffectiveProblem::new(PotentialSpec::none(), omega, l)?;
    let hi = oscillator_level(omega, OSCILLATOR_LEVELS, l) - omega;
    let shooter = Shooter::new(&problem, grid, solver)?;
    let brackets = shooter.bracket_states(0.5 * oscillator_level(omega, 0, l), hi)?;
    brackets
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let s = shooter.solve_state(b)?;
            Ok((n, oscillator_level(omega, n, l), s.eta, s.nodes))
        })
        .collect()
}

fn run_oscillator_check(config: &RunConfig, grid: &RadialGrid, out: &mut dyn Write) -> Result<(), RunError> {
    let solver = config.solver();
    let mut rows = Vec::new();
    for l in OSCILLATOR_LS {
        rows.push((l, oscillator_levels(config.omega, l, grid, &solver)?));
    }
    create_output_dir(&config.output_dir)?;
    let mut csv = String::from("l,n,exact,eta,error,nodes\n");
    writeln!(out, "oscillator-check: omega = {:e}", config.omega)?;
    print_grid(out, grid)?;
    let mut worst: f64 = 0.0;
    let mut complete = true;
    for (l, levels) in &rows {
        complete &= levels.len() == OSCILLATOR_LEVELS;
        for &(n, exact, eta, nodes) in levels {
            let err = eta - exact;
            worst = worst.max(err.abs());
            csv.push_str(&format!(
                "{l},{n},{},{},{},{nodes}\n",
                csv_number(exact),
                csv_number(eta),
                csv_number(err)
            ));
            writeln!(
                out,
                "  l = {l}  n = {n}  exact = {exact:.10}  eta = {eta:.12}  error = {err:+.3e}  nodes = {nodes}"
            )?;
        }
    }
    write_file(&config.output_dir.join("oscillator_check.csv"), &csv)?;
    writeln!(out, "  max |error| = {worst:.3e} (tolerance {OSCILLATOR_TOL:e})")?;
    if !complete {
        return Err(RunError::NoState(
            "oscillator-check: a level is missing from the scan".into(),
        ));
    }
    if worst > OSCILLATOR_TOL {
        return Err(RunError::Convergence(format!(
            "oscillator-check: max error {worst:.3e} exceeds {OSCILLATOR_TOL:e}"
        )));
    }
    Ok(())
}
