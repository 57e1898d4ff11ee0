//! Double-sided shooting.
//!
//! At a trial energy η the regular solution is swept outward from `r_min` and
//! the decaying solution inward from `r_max`. Both are scaled to `u(m) = 1` at
//! the matching index `m`, and the mismatch is
//!
//! ```text
//! δ(η) = u'_out(m) − u'_in(m)
//! ```
//!
//! with a 5-point centered derivative. δ vanishes at eigenvalues, but it also
//! changes sign at the poles where `u_out(m)` or `u_in(m)` passes through
//! zero. The Wronskian `W = δ · u_out(m) · u_in(m)` (unscaled branches) is
//! continuous in η and vanishes only at eigenvalues, so brackets and
//! bisection follow the sign of `W`; only its sign is used, which survives
//! the positive rescaling inside the sweeps.

use serde::Serialize;

use crate::error::{Direction, Error, Result};
use crate::numerov::{
    large_r_seed, regular_seeds, sweep_inward, sweep_outward, trapezoid_norm_squared,
    RadialGrid, WaveFunction,
};
use crate::potentials::{sample_effective_potential, EffectiveProblem};

/// Where the two branches are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchStrategy {
    /// Largest index with `V_eff < η`; the grid midpoint if there is none.
    OutermostTurningPoint,
    /// A fixed grid index, clamped into `[2, n − 3]`.
    FixedIndex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub match_strategy: MatchStrategy,
    /// Absolute bisection tolerance in Hartree.
    pub energy_tol: f64,
    pub max_iter: usize,
    /// Number of trial energies in a bracket scan.
    pub scan_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            match_strategy: MatchStrategy::OutermostTurningPoint,
            energy_tol: 1e-10,
            max_iter: 200,
            scan_points: 400,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy_tol.is_finite() && self.energy_tol > 0.0) {
            return Err(Error::Config {
                field: "energy_tol",
                reason: format!("must be > 0, got {}", self.energy_tol),
            });
        }
        if self.max_iter < 8 {
            return Err(Error::Config {
                field: "max_iter",
                reason: format!("must be >= 8, got {}", self.max_iter),
            });
        }
        if self.scan_points < 2 {
            return Err(Error::Config {
                field: "scan_points",
                reason: format!("must be >= 2, got {}", self.scan_points),
            });
        }
        Ok(())
    }
}

/// Grid, problem and solver settings behind an eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Provenance {
    pub grid: RadialGrid,
    pub problem: EffectiveProblem,
    pub config: SolverConfig,
    pub matching_index: usize,
    pub matching_radius: f64,
}

/// Converged bound state.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eta: f64,
    /// Glued and normalized.
    pub wavefunction: WaveFunction,
    pub nodes: usize,
    /// `|δ(η)|` at the returned energy.
    pub residual: f64,
    pub iterations: usize,
    pub grid_echo: Provenance,
}

/// Energy interval holding one sign change of the matching Wronskian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// Node count of the glued solution at the midpoint.
    pub nodes: usize,
}

/// Result of one shot at a trial energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mismatch {
    pub delta: f64,
    pub nodes: usize,
    pub matching_index: usize,
    /// Sign of the Wronskian: `+1`, `−1` or `0`.
    pub wronskian_sign: i8,
}

/// Strict sign changes of the samples, skipping exact zeros.
///
/// A run of interior zeros between samples of opposite sign counts once; a
/// run between samples of equal sign counts zero times. Leading and trailing
/// zeros are boundary values, not nodes.
pub fn count_nodes(samples: &[f64]) -> usize {
    count_sign_changes(samples.iter().copied())
}

fn count_sign_changes(samples: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0_f64;
    let mut nodes = 0;
    for u in samples.filter(|u| *u != 0.0) {
        if last != 0.0 && (u > 0.0) != (last > 0.0) {
            nodes += 1;
        }
        last = u;
    }
    nodes
}

/// Rescale to unit trapezoidal norm with a positive first nonzero sample.
pub fn normalize(wavefunction: &WaveFunction) -> Result<WaveFunction> {
    let norm2 = trapezoid_norm_squared(&wavefunction.samples, wavefunction.grid.h());
    if !(norm2.is_finite() && norm2 > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let leading = wavefunction
        .samples
        .iter()
        .copied()
        .find(|u| *u != 0.0)
        .ok_or(Error::ZeroNorm)?;
    let scale = leading.signum() / norm2.sqrt();
    Ok(WaveFunction {
        grid: wavefunction.grid,
        samples: wavefunction.samples.iter().map(|u| u * scale).collect(),
        nodes: wavefunction.nodes,
        norm_applied: true,
    })
}

/// `δ(η)` and the glued node count.
pub fn mismatch(
    problem: &EffectiveProblem,
    grid: &RadialGrid,
    eta: f64,
    config: &SolverConfig,
) -> Result<(f64, usize)> {
    let m = Shooter::new(problem, grid, config)?.mismatch(eta)?;
    Ok((m.delta, m.nodes))
}

/// Brackets of sign changes on `scan_points` uniform energies in
/// `[eta_lo, eta_hi]`, ascending.
pub fn bracket_states(
    problem: &EffectiveProblem,
    grid: &RadialGrid,
    eta_lo: f64,
    eta_hi: f64,
    config: &SolverConfig,
) -> Result<Vec<Bracket>> {
    Shooter::new(problem, grid, config)?.bracket_states(eta_lo, eta_hi)
}

/// Bisection inside one bracket.
pub fn solve_state(
    problem: &EffectiveProblem,
    grid: &RadialGrid,
    bracket: &Bracket,
    config: &SolverConfig,
) -> Result<EigenResult> {
    Shooter::new(problem, grid, config)?.solve_state(bracket)
}

/// Every state in `[eta_lo, eta_hi]`, ascending.
pub fn solve_range(
    problem: &EffectiveProblem,
    grid: &RadialGrid,
    eta_lo: f64,
    eta_hi: f64,
    config: &SolverConfig,
) -> Result<Vec<EigenResult>> {
    let shooter = Shooter::new(problem, grid, config)?;
    shooter
        .bracket_states(eta_lo, eta_hi)?
        .iter()
        .map(|b| shooter.solve_state(b))
        .collect()
}

/// Default scan range `[max(V_min, −1e5), min(0, V_eff(r_max))]`, or
/// `None` when it is empty.
///
/// The upper end stops just below the continuum edge when `V_eff(r_max)` is
/// negative, so the inward seed stays valid.
pub fn default_bound_range(problem: &EffectiveProblem, grid: &RadialGrid) -> Result<Option<(f64, f64)>> {
    let veff = sample_effective_potential(problem, grid)?;
    let v_min = veff.iter().copied().fold(f64::INFINITY, f64::min);
    let edge = veff[veff.len() - 1];
    let hi = if edge > 0.0 {
        0.0
    } else {
        edge - 1e-9 * edge.abs().max(f64::MIN_POSITIVE)
    };
    let lo = v_min.max(-1e5);
    Ok((lo < hi).then_some((lo, hi)))
}

/// Scan range for the lowest state of any sign.
///
/// Starts at `max(V_min, −1e5)`. With a confining wall the upper end is
/// `V_eff(r_max) / 2`, which keeps the states it admits away from the wall;
/// otherwise it is the continuum edge.
pub fn ground_search_range(problem: &EffectiveProblem, grid: &RadialGrid) -> Result<(f64, f64)> {
    let veff = sample_effective_potential(problem, grid)?;
    let v_min = veff.iter().copied().fold(f64::INFINITY, f64::min);
    let edge = veff[veff.len() - 1];
    let hi = if edge > 0.0 {
        0.5 * edge
    } else {
        edge - 1e-9 * edge.abs().max(f64::MIN_POSITIVE)
    };
    Ok((v_min.max(-1e5), hi))
}

/// Shooting state for one problem on one grid; `V_eff` is sampled once.
#[derive(Debug, Clone)]
pub struct Shooter {
    problem: EffectiveProblem,
    grid: RadialGrid,
    config: SolverConfig,
    veff: Vec<f64>,
}

struct Shot {
    outward: Vec<f64>,
    inward: Vec<f64>,
    m: usize,
    mismatch: Mismatch,
}

const REFINE_DEPTH: u32 = 12;

impl Shooter {
    pub fn new(problem: &EffectiveProblem, grid: &RadialGrid, config: &SolverConfig) -> Result<Self> {
        problem.validate()?;
        config.validate()?;
        let veff = sample_effective_potential(problem, grid)?;
        Ok(Self {
            problem: *problem,
            grid: *grid,
            config: *config,
            veff,
        })
    }

    pub fn veff(&self) -> &[f64] {
        &self.veff
    }

    pub fn matching_index(&self, eta: f64) -> usize {
        let n = self.grid.n();
        let m = match self.config.match_strategy {
            MatchStrategy::FixedIndex(i) => i,
            MatchStrategy::OutermostTurningPoint => {
                self.veff.iter().rposition(|&v| v < eta).unwrap_or(n / 2)
            }
        };
        m.clamp(2, n - 3)
    }

    pub fn mismatch(&self, eta: f64) -> Result<Mismatch> {
        Ok(self.shoot(eta)?.mismatch)
    }

    fn shoot(&self, eta: f64) -> Result<Shot> {
        let n = self.grid.n();
        let h = self.grid.h();
        let m = self.matching_index(eta);
        let g = |i: usize| self.veff[i] - eta;
        let fault = |e: Error| match e {
            Error::IntegratorFault { direction, index } => Error::Propagation {
                eta,
                direction,
                index,
            },
            other => other,
        };

        let (u0, u1) = regular_seeds(&self.problem, eta, self.grid.radius(0), self.grid.radius(1));
        let outward = sweep_outward(h, g, n, m + 2, u0, u1).map_err(fault)?.samples;
        let (a, b) = large_r_seed(&self.problem, eta, &self.grid)?;
        let inward = sweep_inward(h, g, n, m - 2, a, b).map_err(fault)?.samples;

        let (po, pi) = (outward[m], inward[m]);
        for (p, direction) in [(po, Direction::Outward), (pi, Direction::Inward)] {
            if !p.is_finite() {
                return Err(Error::Propagation {
                    eta,
                    direction,
                    index: m,
                });
            }
        }
        let slope = |u: &[f64]| (u[m - 2] - 8.0 * u[m - 1] + 8.0 * u[m + 1] - u[m + 2]) / (12.0 * h);
        let delta = slope(&outward) / po - slope(&inward) / pi;
        let sign = delta.signum() * po.signum() * pi.signum();
        let wronskian_sign = if delta == 0.0 || po == 0.0 || pi == 0.0 {
            0
        } else if sign > 0.0 {
            1
        } else {
            -1
        };

        let (so, si) = (po.signum(), pi.signum());
        let nodes = count_sign_changes(
            outward[..=m]
                .iter()
                .map(|u| u * so)
                .chain(inward[m + 1..].iter().map(|u| u * si)),
        );
        Ok(Shot {
            outward,
            inward,
            m,
            mismatch: Mismatch {
                delta,
                nodes,
                matching_index: m,
                wronskian_sign,
            },
        })
    }

    pub fn bracket_states(&self, eta_lo: f64, eta_hi: f64) -> Result<Vec<Bracket>> {
        if !(eta_lo.is_finite() && eta_hi.is_finite() && eta_lo < eta_hi) {
            return Err(Error::Config {
                field: "eta_range",
                reason: format!("need eta_lo < eta_hi, got [{eta_lo}, {eta_hi}]"),
            });
        }
        let k = self.config.scan_points;
        let step = (eta_hi - eta_lo) / (k - 1) as f64;
        let etas: Vec<f64> = (0..k)
            .map(|i| if i == k - 1 { eta_hi } else { eta_lo + i as f64 * step })
            .collect();
        let shots = etas
            .iter()
            .map(|&e| self.mismatch(e))
            .collect::<Result<Vec<_>>>()?;

        let mut brackets = Vec::new();
        for i in 0..k - 1 {
            self.collect_brackets(
                (etas[i], shots[i]),
                (etas[i + 1], shots[i + 1]),
                REFINE_DEPTH,
                &mut brackets,
            )?;
        }
        Ok(brackets)
    }

    /// Adds the bracket(s) of one scan interval. A node-count jump of two or
    /// more means a state was stepped over, so the interval is split.
    fn collect_brackets(
        &self,
        (a, sa): (f64, Mismatch),
        (b, sb): (f64, Mismatch),
        depth: u32,
        out: &mut Vec<Bracket>,
    ) -> Result<()> {
        let jump = sb.nodes.abs_diff(sa.nodes);
        if depth > 0 && (jump >= 2 || (jump == 1 && sa.wronskian_sign == sb.wronskian_sign)) {
            let mid = 0.5 * (a + b);
            if mid > a && mid < b {
                let sm = self.mismatch(mid)?;
                self.collect_brackets((a, sa), (mid, sm), depth - 1, out)?;
                return self.collect_brackets((mid, sm), (b, sb), depth - 1, out);
            }
        }
        if sa.wronskian_sign != 0 && sb.wronskian_sign != 0 && sa.wronskian_sign != sb.wronskian_sign {
            // A pole of the glued count may share the interval; narrow until
            // both ends agree so the label is the state's own count.
            let (mut a, mut b, mut sa, mut sb) = (a, b, sa, sb);
            for _ in 0..2 * REFINE_DEPTH {
                let mid = 0.5 * (a + b);
                if sa.nodes == sb.nodes || !(mid > a && mid < b) {
                    break;
                }
                let sm = self.mismatch(mid)?;
                if sm.wronskian_sign == 0 {
                    (a, b, sa, sb) = (mid, mid, sm, sm);
                } else if sm.wronskian_sign == sa.wronskian_sign {
                    (a, sa) = (mid, sm);
                } else {
                    (b, sb) = (mid, sm);
                }
            }
            let nodes = self.mismatch(0.5 * (a + b))?.nodes;
            out.push(Bracket { lo: a, hi: b, nodes });
        } else if sa.wronskian_sign == 0 && out.last().is_none_or(|l| l.hi < a) {
            // exact hit on a scan energy
            out.push(Bracket {
                lo: a,
                hi: a,
                nodes: sa.nodes,
            });
        }
        Ok(())
    }

    pub fn solve_state(&self, bracket: &Bracket) -> Result<EigenResult> {
        let (mut lo, mut hi) = (bracket.lo, bracket.hi);
        let s_lo = self.mismatch(lo)?.wronskian_sign;
        let s_hi = self.mismatch(hi)?.wronskian_sign;
        if s_lo == 0 {
            hi = lo;
        } else if s_hi == 0 {
            lo = hi;
        } else if s_lo == s_hi {
            return Err(Error::InvalidBracket { lo, hi });
        }
        let mut iterations = 0;
        while hi - lo > self.config.energy_tol {
            if iterations == self.config.max_iter {
                return Err(Error::NoConvergence {
                    lo,
                    hi,
                    iterations,
                });
            }
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.mismatch(mid)?.wronskian_sign {
                0 => {
                    lo = mid;
                    hi = mid;
                }
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        let eta = 0.5 * (lo + hi);
        let shot = self.shoot(eta)?;
        let wavefunction = normalize(&glue(&shot, &self.grid))?;
        Ok(EigenResult {
            eta,
            nodes: wavefunction.nodes,
            wavefunction,
            residual: shot.mismatch.delta.abs(),
            iterations,
            grid_echo: Provenance {
                grid: self.grid,
                problem: self.problem,
                config: self.config,
                matching_index: shot.m,
                matching_radius: self.grid.radius(shot.m),
            },
        })
    }

    /// Lowest state in `[eta_lo, eta_hi]`, if any.
    pub fn ground_state(&self, eta_lo: f64, eta_hi: f64) -> Result<Option<EigenResult>> {
        match self.bracket_states(eta_lo, eta_hi)?.first() {
            Some(b) => self.solve_state(b).map(Some),
            None => Ok(None),
        }
    }
}

fn glue(shot: &Shot, grid: &RadialGrid) -> WaveFunction {
    let m = shot.m;
    let (po, pi) = (shot.outward[m], shot.inward[m]);
    let samples = shot.outward[..=m]
        .iter()
        .map(|u| u / po)
        .chain(shot.inward[m + 1..].iter().map(|u| u / pi))
        .collect();
    WaveFunction::new(*grid, samples)
}
