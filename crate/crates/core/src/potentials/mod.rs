//! Inter-electronic potentials, confinement, and the effective potential
//!
//! `V_eff(r) = V(r) + ω² r² + (l² − 1/4) / r²`
//!
//! in Hartree atomic units. For `l = 0` the centrifugal term is the attractive
//! `−1/(4r²)`, the critical strength of the planar radial problem.

mod bessel;

pub use bessel::{bessel_k0, K0_BRANCH_POINT};

use serde::Serialize;

use crate::error::{require_positive_radius, Error, Result};
use crate::numerov::RadialGrid;

/// Attractive prefactor `−1/(2π)` used for the Chern-Simons interaction.
pub const CHERN_SIMONS_STRENGTH: f64 = -1.0 / (2.0 * std::f64::consts::PI);

/// Which functional form the inter-electronic potential takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `strength / r`
    InverseR,
    /// `strength · ln r`, no reference radius.
    LogR,
    /// `strength · K0(mass_scale · r)`
    BesselK0,
    /// `V ≡ 0`, the bare oscillator.
    None,
}

impl PotentialKind {
    pub fn label(self) -> &'static str {
        match self {
            PotentialKind::InverseR => "inverse-r",
            PotentialKind::LogR => "log-r",
            PotentialKind::BesselK0 => "bessel-k0",
            PotentialKind::None => "none",
        }
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inverse-r" => Ok(PotentialKind::InverseR),
            "log-r" => Ok(PotentialKind::LogR),
            "bessel-k0" => Ok(PotentialKind::BesselK0),
            "none" => Ok(PotentialKind::None),
            other => Err(format!(
                "unknown potential `{other}` (expected inverse-r, log-r, bessel-k0 or none)"
            )),
        }
    }
}

/// An inter-electronic potential Ansatz together with its parameters.
///
/// `strength` carries Hartree·bohr for [`PotentialKind::InverseR`] and Hartree
/// otherwise. `mass_scale` is the inverse screening length κ in bohr⁻¹ and is
/// only read by [`PotentialKind::BesselK0`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub strength: f64,
    pub mass_scale: f64,
}

impl PotentialSpec {
    pub fn inverse_r(strength: f64) -> Self {
        Self {
            kind: PotentialKind::InverseR,
            strength,
            mass_scale: 0.0,
        }
    }

    pub fn log_r(strength: f64) -> Self {
        Self {
            kind: PotentialKind::LogR,
            strength,
            mass_scale: 0.0,
        }
    }

    pub fn bessel_k0(strength: f64, mass_scale: f64) -> Self {
        Self {
            kind: PotentialKind::BesselK0,
            strength,
            mass_scale,
        }
    }

    pub fn none() -> Self {
        Self {
            kind: PotentialKind::None,
            strength: 0.0,
            mass_scale: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind != PotentialKind::None && !(self.strength.is_finite() && self.strength != 0.0)
        {
            return Err(Error::Config {
                field: "strength",
                reason: format!("must be finite and nonzero, got {}", self.strength),
            });
        }
        if self.kind == PotentialKind::BesselK0
            && !(self.mass_scale.is_finite() && self.mass_scale > 0.0)
        {
            return Err(Error::Config {
                field: "mass_scale",
                reason: format!("must be positive for bessel-k0, got {}", self.mass_scale),
            });
        }
        Ok(())
    }

    /// Leading small-r behavior `V(r) ≈ a/r + b ln r + c`.
    ///
    /// Used to build the regular-branch seed near the origin.
    pub(crate) fn near_origin(&self) -> NearOrigin {
        match self.kind {
            PotentialKind::InverseR => NearOrigin {
                inverse: self.strength,
                log: 0.0,
                constant: 0.0,
            },
            PotentialKind::LogR => NearOrigin {
                inverse: 0.0,
                log: self.strength,
                constant: 0.0,
            },
            // K0(κr) = −ln r − (ln(κ/2) + γ) + O(r² ln r)
            PotentialKind::BesselK0 => NearOrigin {
                inverse: 0.0,
                log: -self.strength,
                constant: -self.strength * ((0.5 * self.mass_scale).ln() + 0.577_215_664_901_532_9),
            },
            PotentialKind::None => NearOrigin::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct NearOrigin {
    pub inverse: f64,
    pub log: f64,
    pub constant: f64,
}

/// Full statement of one radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveProblem {
    pub potential: PotentialSpec,
    /// Relative-motion confinement frequency ω in Hartree (half the trap
    /// frequency Ω).
    pub omega: f64,
    /// Angular momentum; only `l²` enters the equation.
    pub l: i32,
}

impl EffectiveProblem {
    pub fn new(potential: PotentialSpec, omega: f64, l: i32) -> Result<Self> {
        let problem = Self {
            potential,
            omega,
            l,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::Config {
                field: "omega",
                reason: format!("must be >= 0, got {}", self.omega),
            });
        }
        if self.omega == 0.0
            && matches!(
                self.potential.kind,
                PotentialKind::InverseR | PotentialKind::LogR
            )
        {
            return Err(Error::Config {
                field: "omega",
                reason: "omega = 0 is only allowed for bessel-k0 and none".into(),
            });
        }
        Ok(())
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    /// Same problem with a different angular momentum.
    pub fn with_l(mut self, l: i32) -> Self {
        self.l = l;
        self
    }

    pub(crate) fn centrifugal_coefficient(&self) -> f64 {
        let l = f64::from(self.l);
        l * l - 0.25
    }
}

/// `V(r)` for a single Ansatz; no clamping or smoothing.
pub fn eval_potential(spec: &PotentialSpec, r: f64) -> Result<f64> {
    require_positive_radius(r)?;
    Ok(match spec.kind {
        PotentialKind::InverseR => spec.strength / r,
        PotentialKind::LogR => spec.strength * r.ln(),
        PotentialKind::BesselK0 => spec.strength * bessel_k0(spec.mass_scale * r)?,
        PotentialKind::None => 0.0,
    })
}

/// `V(r) + ω² r² + (l² − 1/4) / r²`.
pub fn effective_potential(problem: &EffectiveProblem, r: f64) -> Result<f64> {
    let v = eval_potential(&problem.potential, r)?;
    let w = problem.omega;
    Ok(v + w * w * r * r + problem.centrifugal_coefficient() / (r * r))
}

/// `V_eff` sampled at every grid point.
pub fn sample_effective_potential(problem: &EffectiveProblem, grid: &RadialGrid) -> Result<Vec<f64>> {
    (0..grid.n())
        .map(|i| effective_potential(problem, grid.radius(i)))
        .collect()
}

/// Grid point with the lowest `V_eff`; ties go to the smaller radius.
pub fn potential_minimum(problem: &EffectiveProblem, grid: &RadialGrid) -> Result<(f64, f64)> {
    let samples = (0..grid.n())
        .map(|i| {
            let r = grid.radius(i);
            effective_potential(problem, r).map(|v| (r, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(first_minimum(samples))
}

fn first_minimum(samples: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    samples
        .into_iter()
        .fold((f64::NAN, f64::INFINITY), |best, (r, v)| if v < best.1 { (r, v) } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn confined(spec: PotentialSpec, l: i32) -> EffectiveProblem {
        EffectiveProblem::new(spec, 0.01, l).unwrap()
    }

    #[test]
    fn potential_values() {
        assert_eq!(eval_potential(&PotentialSpec::inverse_r(1.0), 2.0).unwrap(), 0.5);
        assert_eq!(eval_potential(&PotentialSpec::log_r(1.0), 1.0).unwrap(), 0.0);
        assert_eq!(eval_potential(&PotentialSpec::none(), 3.0).unwrap(), 0.0);
        let k = eval_potential(&PotentialSpec::bessel_k0(1.0, 1.0), 1.0).unwrap();
        assert_relative_eq!(k, 0.421_024_438_240_708_3, max_relative = 1e-13);
    }

    #[test]
    fn rejects_bad_radius() {
        let spec = PotentialSpec::inverse_r(1.0);
        for r in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(eval_potential(&spec, r), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn effective_potential_values() {
        let p = confined(PotentialSpec::inverse_r(1.0), 0);
        assert_relative_eq!(effective_potential(&p, 1.0).unwrap(), 0.7501, max_relative = 1e-15);

        let p = confined(PotentialSpec::log_r(1.0), 1);
        let want = 2f64.ln() + 0.0004 + 0.75 / 4.0;
        assert_relative_eq!(effective_potential(&p, 2.0).unwrap(), want, max_relative = 1e-15);

        let p = confined(PotentialSpec::inverse_r(1.0), 0);
        let v = effective_potential(&p, 0.01).unwrap();
        assert!((v - (-2400.0)).abs() < 1e-6);
    }

    #[test]
    fn problem_validation() {
        assert!(EffectiveProblem::new(PotentialSpec::inverse_r(1.0), -1.0, 0).is_err());
        assert!(EffectiveProblem::new(PotentialSpec::log_r(1.0), 0.0, 0).is_err());
        assert!(EffectiveProblem::new(PotentialSpec::bessel_k0(-0.1, 1e-3), 0.0, 0).is_ok());
        assert!(EffectiveProblem::new(PotentialSpec::none(), 0.0, 2).is_ok());
        assert!(EffectiveProblem::new(PotentialSpec::inverse_r(0.0), 0.01, 0).is_err());
        assert!(EffectiveProblem::new(PotentialSpec::bessel_k0(1.0, 0.0), 0.01, 0).is_err());
    }

    #[test]
    fn minimum_of_bare_oscillator_l1() {
        // d/dr [ω²r² + 3/(4r²)] = 0  =>  r⁴ = 3 / (4 ω²)
        let p = EffectiveProblem::new(PotentialSpec::none(), 0.01, 1).unwrap();
        let grid = RadialGrid::new(0.1, 50.0, 49_901).unwrap();
        let (r, v) = potential_minimum(&p, &grid).unwrap();
        // Dense scan as its own oracle.
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=4_990_000 {
            let x = 0.1 + i as f64 * 1e-5;
            let y = 1e-4 * x * x + 0.75 / (x * x);
            if y < best.1 {
                best = (x, y);
            }
        }
        assert!((r - best.0).abs() <= grid.h());
        assert!((v - best.1).abs() < 1e-8);
        assert_relative_eq!(best.0, (0.75f64 / 1e-4).powf(0.25), max_relative = 1e-4);
    }

    #[test]
    fn minimum_at_first_point_for_s_wave() {
        let p = confined(PotentialSpec::inverse_r(1.0), 0);
        let grid = RadialGrid::new(1e-4, 10.0, 1001).unwrap();
        let (r, _) = potential_minimum(&p, &grid).unwrap();
        assert_eq!(r, grid.radius(0));
    }

    #[test]
    fn minimum_tie_goes_to_smaller_radius() {
        let samples = [(0.1, 3.0), (0.2, -1.0), (0.3, 2.0), (0.4, -1.0)];
        assert_eq!(first_minimum(samples), (0.2, -1.0));
    }

    proptest! {
        #[test]
        fn l_sign_symmetry(r in 1e-3f64..50.0, l in 0i32..6, kind in 0usize..4) {
            let spec = [
                PotentialSpec::inverse_r(1.0),
                PotentialSpec::log_r(1.0),
                PotentialSpec::bessel_k0(-0.2, 0.7),
                PotentialSpec::none(),
            ][kind];
            let p = EffectiveProblem::new(spec, 0.03, l).unwrap();
            let a = effective_potential(&p, r).unwrap();
            let b = effective_potential(&p.with_l(-l), r).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a.is_finite());
        }

        #[test]
        fn s_wave_dominated_by_critical_term(kind in 0usize..3, exp in 4.0f64..7.0) {
            let spec = [
                PotentialSpec::inverse_r(1.0),
                PotentialSpec::log_r(1.0),
                PotentialSpec::bessel_k0(-0.2, 0.7),
            ][kind];
            let p = EffectiveProblem::new(spec, 0.01, 0).unwrap();
            let r = 10f64.powf(-exp);
            let v = effective_potential(&p, r).unwrap();
            let ratio = v / (-0.25 / (r * r));
            prop_assert!((ratio - 1.0).abs() < 1e-2);
        }

        #[test]
        fn higher_l_diverges_at_both_ends(kind in 0usize..3, l in 1i32..4) {
            let spec = [
                PotentialSpec::inverse_r(1.0),
                PotentialSpec::log_r(1.0),
                PotentialSpec::bessel_k0(-0.2, 0.7),
            ][kind];
            let p = EffectiveProblem::new(spec, 0.01, l).unwrap();
            let near = effective_potential(&p, 1e-5).unwrap();
            let far = effective_potential(&p, 1e5).unwrap();
            prop_assert!(near > 1e9 && far > 1e5);
        }
    }
}
