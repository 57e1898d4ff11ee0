//! Uniform radial grid and the Numerov three-term recurrence for
//! `u''(r) = g(r) u(r)`, `g = V_eff − η`.
//!
//! ```text
//! u[i+1] (1 − h² g[i+1]/12) = 2 u[i] (1 + 5 h² g[i]/12) − u[i−1] (1 − h² g[i−1]/12)
//! ```
//!
//! Local truncation error is O(h⁶), global O(h⁴). Sweeps through classically
//! forbidden regions grow exponentially; whenever |u| passes
//! [`RESCALE_THRESHOLD`] the live pair is scaled down and the factor is
//! applied to the already computed samples in one pass at the end, so a long
//! sweep costs O(n) regardless of how many rescales it needs.

use serde::Serialize;

use crate::error::{Direction, Error, Result};
use crate::potentials::{effective_potential, eval_potential, EffectiveProblem};

/// |u| above which a running solution is rescaled.
pub const RESCALE_THRESHOLD: f64 = 1e250;

/// Magnitude of the inward seed at `r_max`.
pub const INWARD_SEED_MAGNITUDE: f64 = 1e-24;

/// Uniform grid `r_i = r_min + i h`, `i = 0..n`.
///
/// `r_min` is not just numerics: for `l = 0` it regularizes the critical
/// `−1/(4r²)` term and must be reported with every eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    n: usize,
    h: f64,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_min > 0.0) {
            return Err(Error::Config {
                field: "r_min",
                reason: format!("r_min must be > 0, got {r_min}"),
            });
        }
        if !(r_max.is_finite() && r_max > r_min) {
            return Err(Error::Config {
                field: "r_max",
                reason: format!("r_max must exceed r_min ({r_max} <= {r_min})"),
            });
        }
        if n < Self::MIN_POINTS {
            return Err(Error::Config {
                field: "points",
                reason: format!("need at least {} points, got {n}", Self::MIN_POINTS),
            });
        }
        Ok(Self {
            r_min,
            r_max,
            n,
            h: (r_max - r_min) / (n - 1) as f64,
        })
    }

    /// Grid with a prescribed spacing; `r_max` is rounded to a whole number of
    /// steps.
    pub fn with_spacing(r_min: f64, r_max: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Config {
                field: "h",
                reason: format!("spacing must be positive, got {h}"),
            });
        }
        let steps = ((r_max - r_min) / h).round();
        if !(steps.is_finite() && steps >= 1.0) {
            return Err(Error::Config {
                field: "r_max",
                reason: format!("r_max must exceed r_min ({r_max} <= {r_min})"),
            });
        }
        Self::new(r_min, r_min + steps * h, steps as usize + 1)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Radius of point `i`, computed from the index.
    pub fn radius(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.h
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.radius(i))
    }
}

/// `build_grid(r_min, r_max, n)`.
pub fn build_grid(r_min: f64, r_max: f64, n: usize) -> Result<RadialGrid> {
    RadialGrid::new(r_min, r_max, n)
}

/// Radial samples `u_i` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: RadialGrid,
    pub samples: Vec<f64>,
    pub nodes: usize,
    pub norm_applied: bool,
}

impl WaveFunction {
    pub fn new(grid: RadialGrid, samples: Vec<f64>) -> Self {
        let nodes = crate::eigensolver::count_nodes(&samples);
        Self {
            grid,
            samples,
            nodes,
            norm_applied: false,
        }
    }

    /// Trapezoidal `∫ u² dr`.
    pub fn norm_squared(&self) -> f64 {
        trapezoid_norm_squared(&self.samples, self.grid.h())
    }
}

pub(crate) fn trapezoid_norm_squared(samples: &[f64], h: f64) -> f64 {
    match samples {
        [] => 0.0,
        [only] => 0.0 * only,
        [first, .., last] => {
            let sum: f64 = samples.iter().map(|u| u * u).sum();
            h * (sum - 0.5 * (first * first + last * last))
        }
    }
}

/// Output of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub samples: Vec<f64>,
    /// Number of times the running solution was scaled down.
    pub rescales: usize,
}

/// Numerov sweep over the whole grid from the two innermost samples.
pub fn numerov_outward(grid: &RadialGrid, g: &[f64], u0: f64, u1: f64) -> Result<Propagation> {
    check_sweep_inputs(grid, g, u0, u1)?;
    sweep_outward(grid.h(), |i| g[i], grid.n(), grid.n() - 1, u0, u1)
}

/// Numerov sweep over the whole grid from the two outermost samples.
pub fn numerov_inward(
    grid: &RadialGrid,
    g: &[f64],
    u_last: f64,
    u_second_last: f64,
) -> Result<Propagation> {
    check_sweep_inputs(grid, g, u_last, u_second_last)?;
    sweep_inward(grid.h(), |i| g[i], grid.n(), 0, u_last, u_second_last)
}

fn check_sweep_inputs(grid: &RadialGrid, g: &[f64], a: f64, b: f64) -> Result<()> {
    if g.len() != grid.n() {
        return Err(Error::Config {
            field: "g_values",
            reason: format!("expected {} values, got {}", grid.n(), g.len()),
        });
    }
    if let Some(i) = g.iter().position(|x| !x.is_finite()) {
        return Err(Error::Config {
            field: "g_values",
            reason: format!("non-finite value at index {i}"),
        });
    }
    if !(a.is_finite() && b.is_finite()) || (a == 0.0 && b == 0.0) {
        return Err(Error::Config {
            field: "seeds",
            reason: "seeds must be finite and not both zero".into(),
        });
    }
    Ok(())
}

/// Outward recurrence filling indices `0..=stop` of an `n`-long buffer.
pub(crate) fn sweep_outward(
    h: f64,
    g: impl Fn(usize) -> f64,
    n: usize,
    stop: usize,
    u0: f64,
    u1: f64,
) -> Result<Propagation> {
    debug_assert!(stop < n && stop >= 1);
    let c = h * h / 12.0;
    let mut u = vec![0.0; n];
    u[0] = u0;
    u[1] = u1;
    let mut marks = Vec::new();
    let mut f_prev = 1.0 - c * g(0);
    let mut g_cur = g(1);
    for i in 1..stop {
        let g_next = g(i + 1);
        let f_next = 1.0 - c * g_next;
        let next = (2.0 * u[i] * (1.0 + 5.0 * c * g_cur) - u[i - 1] * f_prev) / f_next;
        if !next.is_finite() {
            return Err(Error::IntegratorFault {
                direction: Direction::Outward,
                index: i + 1,
            });
        }
        u[i + 1] = next;
        if next.abs() > RESCALE_THRESHOLD {
            u[i] /= RESCALE_THRESHOLD;
            u[i + 1] /= RESCALE_THRESHOLD;
            marks.push(i);
        }
        f_prev = 1.0 - c * g_cur;
        g_cur = g_next;
    }
    // Samples below each mark still carry the factor removed at that mark.
    let rescales = marks.len();
    let mut factor = 1.0;
    let mut pending = marks.into_iter().rev().peekable();
    for j in (0..stop.min(n)).rev() {
        while pending.peek().is_some_and(|&m| j < m) {
            factor /= RESCALE_THRESHOLD;
            pending.next();
        }
        if factor != 1.0 {
            u[j] *= factor;
        }
    }
    Ok(Propagation {
        samples: u,
        rescales,
    })
}

/// Inward recurrence filling indices `stop..n` of an `n`-long buffer.
pub(crate) fn sweep_inward(
    h: f64,
    g: impl Fn(usize) -> f64,
    n: usize,
    stop: usize,
    u_last: f64,
    u_second_last: f64,
) -> Result<Propagation> {
    debug_assert!(stop + 1 < n);
    let c = h * h / 12.0;
    let mut u = vec![0.0; n];
    u[n - 1] = u_last;
    u[n - 2] = u_second_last;
    let mut marks = Vec::new();
    let mut f_prev = 1.0 - c * g(n - 1);
    let mut g_cur = g(n - 2);
    for i in (stop + 1..n - 1).rev() {
        let g_next = g(i - 1);
        let f_next = 1.0 - c * g_next;
        let next = (2.0 * u[i] * (1.0 + 5.0 * c * g_cur) - u[i + 1] * f_prev) / f_next;
        if !next.is_finite() {
            return Err(Error::IntegratorFault {
                direction: Direction::Inward,
                index: i - 1,
            });
        }
        u[i - 1] = next;
        if next.abs() > RESCALE_THRESHOLD {
            u[i] /= RESCALE_THRESHOLD;
            u[i - 1] /= RESCALE_THRESHOLD;
            marks.push(i);
        }
        f_prev = 1.0 - c * g_cur;
        g_cur = g_next;
    }
    let rescales = marks.len();
    let mut factor = 1.0;
    let mut pending = marks.into_iter().rev().peekable();
    for (j, value) in u.iter_mut().enumerate().skip(stop + 1) {
        while pending.peek().is_some_and(|&m| j > m) {
            factor /= RESCALE_THRESHOLD;
            pending.next();
        }
        if factor != 1.0 {
            *value *= factor;
        }
    }
    Ok(Propagation {
        samples: u,
        rescales,
    })
}

/// Leading small-r behavior of the regular solution, `r^(|l| + 1/2)`.
///
/// For `l = 0` the indicial roots are degenerate; this is the `r^(1/2)`
/// branch, never `r^(1/2) ln r`.
pub fn small_r_seed(l: i32, r: f64) -> f64 {
    r.powf(f64::from(l.unsigned_abs()) + 0.5)
}

/// Regular solution `u(r)`, normalized so that `u ~ r^s` as `r → 0`,
/// `s = |l| + 1/2`.
///
/// Writing `u = r^s f` and `t = ln r`, `f` obeys
/// `f_tt + (2s − 1) f_t = r² q(r) f` with `q = V + ω² r² − η`. The series
/// `f = exp(φ)` (through second order in the `c₁`, `c_L` and `q₀`
/// coefficients of the small-r expansion of `q`) starts the march at
/// `r · 1e-4`, where it is exact to roundoff; RK4 in `t` carries it out to
/// `r`. A truncated series used directly at `r_min` leaves an error in the
/// boundary log derivative that, for `l = 0`, mixes in the irregular
/// `r^(1/2) ln r` branch and drifts the eigenvalue with `r_min`.
pub fn regular_seed(problem: &EffectiveProblem, eta: f64, r: f64) -> f64 {
    regular_seeds(problem, eta, r, r).0
}

/// [`regular_seed`] at `r0 ≤ r1` from a single march.
pub fn regular_seeds(problem: &EffectiveProblem, eta: f64, r0: f64, r1: f64) -> (f64, f64) {
    let s = f64::from(problem.abs_l()) + 0.5;
    let damping = 2.0 * s - 1.0;
    let w2 = problem.omega * problem.omega;
    let rhs = |t: f64, f: f64, ft: f64| {
        let r = t.exp();
        let v = eval_potential(&problem.potential, r).unwrap_or(f64::NAN);
        (ft, r * r * (v + w2 * r * r - eta) * f - damping * ft)
    };

    let r_start = r0 * SERIES_START_FRACTION;
    let (phi, r_dphi) = series_log(problem, eta, r_start);
    let mut t = r_start.ln();
    let mut f = phi.exp();
    let mut ft = f * r_dphi;
    let march = |t_end: f64, t: &mut f64, f: &mut f64, ft: &mut f64| {
        while *t < t_end {
            let r = t.exp();
            let scale = (r * r * (effective_scale(problem, r) + eta.abs())).sqrt();
            let dt = (SEED_STEP / scale.max(1.0)).min(t_end - *t);
            let (k1f, k1g) = rhs(*t, *f, *ft);
            let (k2f, k2g) = rhs(*t + 0.5 * dt, *f + 0.5 * dt * k1f, *ft + 0.5 * dt * k1g);
            let (k3f, k3g) = rhs(*t + 0.5 * dt, *f + 0.5 * dt * k2f, *ft + 0.5 * dt * k2g);
            let (k4f, k4g) = rhs(*t + dt, *f + dt * k3f, *ft + dt * k3g);
            *f += dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
            *ft += dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
            *t += dt;
        }
    };
    march(r0.ln(), &mut t, &mut f, &mut ft);
    let u0 = r0.powf(s) * f;
    if r1 <= r0 {
        return (u0, u0);
    }
    march(r1.ln(), &mut t, &mut f, &mut ft);
    (u0, r1.powf(s) * f)
}

/// Start of the seed march as a fraction of the first grid radius.
const SERIES_START_FRACTION: f64 = 1e-4;

/// Largest step in `ln r` for the seed march.
const SEED_STEP: f64 = 5e-3;

/// Rough size of `|V| + ω² r²`, used only to shorten seed steps where
/// `r² q` is large.
fn effective_scale(problem: &EffectiveProblem, r: f64) -> f64 {
    let v = eval_potential(&problem.potential, r).unwrap_or(0.0);
    v.abs() + problem.omega * problem.omega * r * r
}

/// `φ` and `r φ'` for the small-r series `f = exp(φ)` of the regular branch.
fn series_log(problem: &EffectiveProblem, eta: f64, r: f64) -> (f64, f64) {
    let s = f64::from(problem.abs_l()) + 0.5;
    let a = 2.0 * s + 1.0;
    let origin = problem.potential.near_origin();
    let w2 = problem.omega * problem.omega;
    let r2 = r * r;
    let ln_r = r.ln();
    let c1 = origin.inverse;
    let cl = origin.log;
    let q0 = origin.constant - eta;
    let c11 = c1 * c1 * (1.0 / (4.0 * a * s) - 1.0 / (8.0 * s * s));
    let c4 = (w2 - q0 * q0 / (a * a)) / (4.0 * (a + 2.0));
    let phi = c1 * r / (2.0 * s)
        + c11 * r2
        + cl * r2 * (ln_r / (2.0 * a) - (a + 2.0) / (4.0 * a * a))
        + q0 * r2 / (2.0 * a)
        + c4 * r2 * r2;
    let r_dphi = c1 * r / (2.0 * s)
        + 2.0 * c11 * r2
        + cl * r2 * (ln_r / a + 1.0 / (2.0 * a) - (a + 2.0) / (2.0 * a * a))
        + q0 * r2 / a
        + 4.0 * c4 * r2 * r2;
    (phi, r_dphi)
}

/// Decaying seed pair `(u(r_max), u(r_max − h))` for the inward sweep.
///
/// One WKB step: `u(r_max − h) = ε exp(h sqrt(V_eff(r_max) − η))`.
pub fn large_r_seed(problem: &EffectiveProblem, eta: f64, grid: &RadialGrid) -> Result<(f64, f64)> {
    let v = effective_potential(problem, grid.r_max())?;
    if !(v > eta) {
        return Err(Error::GridTooSmall {
            r_max: grid.r_max(),
            v_eff: v,
            eta,
        });
    }
    let eps = INWARD_SEED_MAGNITUDE;
    Ok((eps, eps * (grid.h() * (v - eta).sqrt()).exp()))
}
