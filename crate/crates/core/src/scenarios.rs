//! Ground-state comparison of the two planar Coulomb forms, the
//! Chern-Simons analogue of hydrogen, the cutoff scan, and figure data.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::eigensolver::{
    default_bound_range, ground_search_range, EigenResult, Shooter, SolverConfig,
};
use crate::error::{Error, Result};
use crate::numerov::RadialGrid;
use crate::potentials::{
    effective_potential, EffectiveProblem, PotentialSpec, CHERN_SIMONS_STRENGTH,
};

/// Ground state of three-dimensional hydrogen, Hartree.
pub const HYDROGEN_GROUND_STATE: f64 = -0.5;

/// Speed of light in atomic units; turns a photon-to-electron mass ratio
/// into an inverse length in bohr⁻¹.
pub const SPEED_OF_LIGHT_AU: f64 = 137.035_999_084;

/// Reference ground-state energies the comparison is measured against.
pub const TARGET_E_INVERSE_R: f64 = -63.92;
pub const TARGET_E_LOG_R: f64 = -45.92;
pub const TARGET_E_CHERN_SIMONS: f64 = -0.00013;

/// Smallest `r_max · κ` accepted for the Chern-Simons grid.
pub const MIN_SCREENING_LENGTHS: f64 = 20.0;

/// Largest `h / r_min` at which s-wave energies are trusted. Above it the
/// Numerov start-up error near the singular centrifugal term dominates: for
/// the log form at ω = 0.01 it is about 5e-5 Ha at 0.25 and 0.07 Ha at 2.5.
pub const MAX_STEP_OVER_CUTOFF: f64 = 0.25;

/// Upper end of the radius range written to the potential figure.
pub const FIG1_R_MAX: f64 = 0.5;

/// Scalar summary of a converged state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSummary {
    pub eta: f64,
    pub nodes: usize,
    pub residual: f64,
    pub iterations: usize,
    pub matching_radius: f64,
}

impl From<&EigenResult> for StateSummary {
    fn from(r: &EigenResult) -> Self {
        Self {
            eta: r.eta,
            nodes: r.nodes,
            residual: r.residual,
            iterations: r.iterations,
            matching_radius: r.grid_echo.matching_radius,
        }
    }
}

/// Outcome for one potential form.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzOutcome {
    pub problem: EffectiveProblem,
    /// Brackets found in the negative-η range `[max(V_min, −1e5), 0]`.
    pub negative_brackets: usize,
    /// Lowest state of any sign.
    pub ground: Option<EigenResult>,
    pub error: Option<String>,
}

/// One row of the cutoff scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffRow {
    pub r_min: f64,
    pub h: f64,
    pub r_max: f64,
    pub points: usize,
    pub eta: Option<f64>,
    pub nodes: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub omega: f64,
    pub grid: RadialGrid,
    pub config: SolverConfig,
    pub inverse_r: AnsatzOutcome,
    pub log_r: AnsatzOutcome,
    /// `|E_ln| / |E_inv|`, present only when both converged.
    pub ratio_ln_over_inv: Option<f64>,
    /// `|E_ln| / 0.5`, present only when the log state converged.
    pub hydrogen_multiple: Option<f64>,
    /// Departures from the reference behavior, in plain words.
    pub findings: Vec<String>,
    pub cutoff_table: Option<Vec<CutoffRow>>,
}

/// Lowest state and negative-range bracket count for one problem.
pub fn analyse_ground_state(
    problem: &EffectiveProblem,
    grid: &RadialGrid,
    config: &SolverConfig,
) -> AnsatzOutcome {
    let run = || -> Result<(usize, Option<EigenResult>)> {
        let shooter = Shooter::new(problem, grid, config)?;
        let negative = match default_bound_range(problem, grid)? {
            Some((lo, hi)) => shooter.bracket_states(lo, hi)?.len(),
            None => 0,
        };
        let (lo, hi) = ground_search_range(problem, grid)?;
        let ground = if lo < hi {
            shooter.ground_state(lo, hi)?
        } else {
            None
        };
        Ok((negative, ground))
    };
    match run() {
        Ok((negative_brackets, ground)) => AnsatzOutcome {
            problem: *problem,
            negative_brackets,
            ground,
            error: None,
        },
        Err(e) => AnsatzOutcome {
            problem: *problem,
            negative_brackets: 0,
            ground: None,
            error: Some(e.to_string()),
        },
    }
}

/// l = 0 ground states of `1/r` and `ln r` at frequency `omega` on one grid.
///
/// The two solves run on separate threads; the report does not depend on
/// their scheduling.
pub fn run_ground_state_comparison(
    omega: f64,
    grid: &RadialGrid,
    config: &SolverConfig,
) -> Result<ScenarioReport> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Config {
            field: "omega",
            reason: format!("comparison needs omega > 0, got {omega}"),
        });
    }
    config.validate()?;
    let inv = EffectiveProblem::new(PotentialSpec::inverse_r(1.0), omega, 0)?;
    let ln = EffectiveProblem::new(PotentialSpec::log_r(1.0), omega, 0)?;
    let (inverse_r, log_r) = std::thread::scope(|s| {
        let a = s.spawn(|| analyse_ground_state(&inv, grid, config));
        let b = analyse_ground_state(&ln, grid, config);
        (a.join().expect("solver thread panicked"), b)
    });

    let e_inv = inverse_r.ground.as_ref().map(|r| r.eta);
    let e_ln = log_r.ground.as_ref().map(|r| r.eta);
    let ratio_ln_over_inv = match (e_ln, e_inv) {
        (Some(l), Some(i)) if i != 0.0 => Some(l.abs() / i.abs()),
        _ => None,
    };
    let hydrogen_multiple = e_ln.map(|l| l.abs() / HYDROGEN_GROUND_STATE.abs());

    let mut findings = Vec::new();
    if grid.h() > MAX_STEP_OVER_CUTOFF * grid.r_min() {
        findings.push(format!(
            "h / r_min = {:.3} exceeds {MAX_STEP_OVER_CUTOFF}: the grid under-resolves the cutoff",
            grid.h() / grid.r_min()
        ));
    }
    for outcome in [&inverse_r, &log_r] {
        let label = outcome.problem.potential.kind.label();
        if let Some(e) = &outcome.error {
            findings.push(format!("{label}: solve failed: {e}"));
        }
        if outcome.negative_brackets != 1 {
            findings.push(format!(
                "{label}: {} negative-energy bound states found, expected exactly one",
                outcome.negative_brackets
            ));
        }
        match &outcome.ground {
            Some(g) if g.eta >= 0.0 => findings.push(format!(
                "{label}: lowest state has eta = {:.6e} Ha >= 0",
                g.eta
            )),
            Some(g) if g.nodes != 0 => findings.push(format!(
                "{label}: lowest state has {} nodes, expected 0",
                g.nodes
            )),
            None if outcome.error.is_none() => {
                findings.push(format!("{label}: no state in the search range"))
            }
            _ => {}
        }
    }
    if let Some(r) = ratio_ln_over_inv {
        if r >= 1.0 {
            findings.push(format!(
                "|E_ln| / |E_inv| = {r:.6} >= 1: the log form is not the shallower one"
            ));
        }
    }

    Ok(ScenarioReport {
        omega,
        grid: *grid,
        config: *config,
        inverse_r,
        log_r,
        ratio_ln_over_inv,
        hydrogen_multiple,
        findings,
        cutoff_table: None,
    })
}

/// Ground state for each inner cutoff, keeping `r_max` of `base_grid` and
/// the whole number of steps closest to its spacing. Rows keep the input order; a failed row records its error
/// and the scan moves on.
pub fn cutoff_sensitivity_scan(
    problem: &EffectiveProblem,
    r_min_list: &[f64],
    base_grid: &RadialGrid,
    config: &SolverConfig,
) -> Result<Vec<CutoffRow>> {
    if let Some(&bad) = r_min_list.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::Config {
            field: "r_min_list",
            reason: format!("every cutoff must be > 0, got {bad}"),
        });
    }
    let monotone = r_min_list.windows(2).all(|w| w[0] < w[1])
        || r_min_list.windows(2).all(|w| w[0] > w[1]);
    if !monotone {
        return Err(Error::Config {
            field: "r_min_list",
            reason: "cutoffs must be strictly increasing or strictly decreasing".into(),
        });
    }
    Ok(r_min_list
        .iter()
        .map(|&r_min| {
            let solved = rebuild_grid(base_grid, r_min).and_then(|grid| {
                let (lo, hi) = ground_search_range(problem, &grid)?;
                let state = Shooter::new(problem, &grid, config)?.ground_state(lo, hi)?;
                Ok((grid, state))
            });
            let row = |grid: &RadialGrid| CutoffRow {
                r_min,
                h: grid.h(),
                r_max: grid.r_max(),
                points: grid.n(),
                eta: None,
                nodes: None,
                error: None,
            };
            match solved {
                Ok((grid, Some(state))) => CutoffRow {
                    eta: Some(state.eta),
                    nodes: Some(state.nodes),
                    ..row(&grid)
                },
                Ok((grid, None)) => CutoffRow {
                    error: Some("no state in the search range".into()),
                    ..row(&grid)
                },
                Err(e) => CutoffRow {
                    r_min,
                    h: base_grid.h(),
                    r_max: base_grid.r_max(),
                    points: 0,
                    eta: None,
                    nodes: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Grid on `[r_min, base.r_max]` with a spacing as close to `base.h` as a
/// whole number of steps allows.
pub fn rebuild_grid(base: &RadialGrid, r_min: f64) -> Result<RadialGrid> {
    let steps = ((base.r_max() - r_min) / base.h()).round();
    if !(steps >= 1.0) {
        return Err(Error::Config {
            field: "r_min",
            reason: format!("cutoff {r_min} is not below r_max = {}", base.r_max()),
        });
    }
    RadialGrid::new(r_min, base.r_max(), steps as usize + 1)
}

/// Row whose energy is closest to `target`.
pub fn select_reproduction_row(table: &[CutoffRow], target: f64) -> Option<&CutoffRow> {
    table
        .iter()
        .filter_map(|row| row.eta.map(|e| ((e - target).abs(), row)))
        .fold(None, |best: Option<(f64, &CutoffRow)>, (d, row)| match best {
            Some((bd, _)) if bd <= d => best,
            _ => Some((d, row)),
        })
        .map(|(_, row)| row)
}

/// `κ = mass_ratio · c` in bohr⁻¹.
pub fn chern_simons_mass_scale(mass_ratio: f64) -> f64 {
    mass_ratio * SPEED_OF_LIGHT_AU
}

/// l = 0, ω = 0 ground state of `−K0(κ r) / (2π)`.
pub fn chern_simons_hydrogen(
    mass_ratio: f64,
    grid: &RadialGrid,
    config: &SolverConfig,
) -> Result<Option<EigenResult>> {
    chern_simons_with_strength(CHERN_SIMONS_STRENGTH, mass_ratio, grid, config)
}

/// As [`chern_simons_hydrogen`] with an arbitrary prefactor; a positive one
/// is repulsive and binds nothing.
pub fn chern_simons_with_strength(
    strength: f64,
    mass_ratio: f64,
    grid: &RadialGrid,
    config: &SolverConfig,
) -> Result<Option<EigenResult>> {
    if !(mass_ratio.is_finite() && mass_ratio > 0.0) {
        return Err(Error::Config {
            field: "mass_ratio",
            reason: format!("must be > 0, got {mass_ratio}"),
        });
    }
    let kappa = chern_simons_mass_scale(mass_ratio);
    if grid.r_max() * kappa < MIN_SCREENING_LENGTHS {
        return Err(Error::Config {
            field: "r_max",
            reason: format!(
                "the potential decays over 1/kappa = {:.4e} bohr; r_max = {} covers only {:.3} \
                 screening lengths, need r_max >= {:.4e}",
                1.0 / kappa,
                grid.r_max(),
                grid.r_max() * kappa,
                MIN_SCREENING_LENGTHS / kappa
            ),
        });
    }
    let problem = EffectiveProblem::new(PotentialSpec::bessel_k0(strength, kappa), 0.0, 0)?;
    match default_bound_range(&problem, grid)? {
        Some((lo, hi)) => Shooter::new(&problem, grid, config)?.ground_state(lo, hi),
        None => Ok(None),
    }
}

/// Files written by [`emit_figure_data`].
#[derive(Debug, Clone, PartialEq)]
pub struct FigureFiles {
    pub effective_potentials: PathBuf,
    pub wavefunctions: PathBuf,
    pub report: PathBuf,
}

pub const FIG1_FILE: &str = "fig1_effective_potentials.csv";
pub const FIG2_FILE: &str = "fig2_wavefunctions.csv";
pub const REPORT_FILE: &str = "report.json";

/// Problems plotted in the potential figure, in column order.
pub fn fig1_columns(omega: f64) -> Result<Vec<(String, EffectiveProblem)>> {
    let mut columns = Vec::new();
    for spec in [PotentialSpec::inverse_r(1.0), PotentialSpec::log_r(1.0)] {
        for l in [0, 1] {
            let name = format!("v_eff_{}_l{l}", spec.kind.label().replace('-', "_"));
            columns.push((name, EffectiveProblem::new(spec, omega, l)?));
        }
    }
    Ok(columns)
}

/// Writes the two figure tables and `report.json` into `output_directory`.
pub fn emit_figure_data(report: &ScenarioReport, output_directory: &Path) -> Result<FigureFiles> {
    let (Some(inv), Some(ln)) = (&report.inverse_r.ground, &report.log_r.ground) else {
        return Err(Error::Config {
            field: "report",
            reason: "figure data needs converged ground states for both potentials".into(),
        });
    };
    fs::create_dir_all(output_directory)?;
    let grid = &report.grid;

    let fig1 = output_directory.join(FIG1_FILE);
    let columns = fig1_columns(report.omega)?;
    let mut w = BufWriter::new(fs::File::create(&fig1)?);
    write!(w, "r")?;
    for (name, _) in &columns {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for i in (0..grid.n()).take_while(|&i| grid.radius(i) <= FIG1_R_MAX) {
        let r = grid.radius(i);
        write!(w, "{}", csv_number(r))?;
        for (_, p) in &columns {
            write!(w, ",{}", csv_number(effective_potential(p, r)?))?;
        }
        writeln!(w)?;
    }
    w.flush()?;

    let fig2 = output_directory.join(FIG2_FILE);
    let mut w = BufWriter::new(fs::File::create(&fig2)?);
    writeln!(w, "r,u_ln,u_inv")?;
    for (i, (a, b)) in ln.wavefunction.samples.iter().zip(&inv.wavefunction.samples).enumerate() {
        writeln!(w, "{},{},{}", csv_number(grid.radius(i)), csv_number(*a), csv_number(*b))?;
    }
    w.flush()?;

    let path = output_directory.join(REPORT_FILE);
    let mut text = serde_json::to_string_pretty(&ReportJson::from(report))?;
    text.push('\n');
    fs::write(&path, text)?;

    Ok(FigureFiles {
        effective_potentials: fig1,
        wavefunctions: fig2,
        report: path,
    })
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x` rounded to six significant digits.
pub fn six_digits(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn six_opt(x: Option<f64>) -> Option<f64> {
    x.map(six_digits)
}

/// Serialized form of [`ScenarioReport`]: named scalars at the top level,
/// everything needed to rerun the computation under `provenance`.
#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub omega: f64,
    pub l: i32,
    pub e_inverse_r: Option<f64>,
    pub e_log_r: Option<f64>,
    pub nodes_inverse_r: Option<usize>,
    pub nodes_log_r: Option<usize>,
    pub residual_inverse_r: Option<f64>,
    pub residual_log_r: Option<f64>,
    pub negative_brackets_inverse_r: usize,
    pub negative_brackets_log_r: usize,
    pub ratio_ln_over_inv: Option<f64>,
    pub hydrogen_multiple: Option<f64>,
    pub target_e_inverse_r: f64,
    pub target_e_log_r: f64,
    pub findings: Vec<String>,
    pub provenance: ProvenanceJson,
}

#[derive(Debug, Serialize)]
pub struct ProvenanceJson {
    pub energy_unit: &'static str,
    pub grid: GridJson,
    pub solver: SolverConfig,
    pub potentials: Vec<PotentialSpec>,
    pub matching_radius_inverse_r: Option<f64>,
    pub matching_radius_log_r: Option<f64>,
    pub cutoff_table: Option<Vec<CutoffRow>>,
    pub crate_version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct GridJson {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub h: f64,
}

impl From<&RadialGrid> for GridJson {
    fn from(g: &RadialGrid) -> Self {
        Self {
            r_min: g.r_min(),
            r_max: g.r_max(),
            points: g.n(),
            h: g.h(),
        }
    }
}

impl From<&ScenarioReport> for ReportJson {
    fn from(r: &ScenarioReport) -> Self {
        let inv = r.inverse_r.ground.as_ref();
        let ln = r.log_r.ground.as_ref();
        Self {
            omega: r.omega,
            l: 0,
            e_inverse_r: six_opt(inv.map(|g| g.eta)),
            e_log_r: six_opt(ln.map(|g| g.eta)),
            nodes_inverse_r: inv.map(|g| g.nodes),
            nodes_log_r: ln.map(|g| g.nodes),
            residual_inverse_r: six_opt(inv.map(|g| g.residual)),
            residual_log_r: six_opt(ln.map(|g| g.residual)),
            negative_brackets_inverse_r: r.inverse_r.negative_brackets,
            negative_brackets_log_r: r.log_r.negative_brackets,
            ratio_ln_over_inv: six_opt(r.ratio_ln_over_inv),
            hydrogen_multiple: six_opt(r.hydrogen_multiple),
            target_e_inverse_r: TARGET_E_INVERSE_R,
            target_e_log_r: TARGET_E_LOG_R,
            findings: r.findings.clone(),
            provenance: ProvenanceJson {
                energy_unit: "hartree",
                grid: (&r.grid).into(),
                solver: r.config,
                potentials: vec![r.inverse_r.problem.potential, r.log_r.problem.potential],
                matching_radius_inverse_r: inv.map(|g| g.grid_echo.matching_radius),
                matching_radius_log_r: ln.map(|g| g.grid_echo.matching_radius),
                cutoff_table: r.cutoff_table.clone(),
                crate_version: env!("CARGO_PKG_VERSION"),
            },
        }
    }
}

/// Writes a cutoff table as CSV.
pub fn write_cutoff_table(rows: &[CutoffRow], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "r_min,h,r_max,points,eta,nodes,error")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            csv_number(row.r_min),
            csv_number(row.h),
            csv_number(row.r_max),
            row.points,
            row.eta.map(csv_number).unwrap_or_default(),
            row.nodes.map(|n| n.to_string()).unwrap_or_default(),
            row.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
        )?;
    }
    w.flush()?;
    Ok(())
}
