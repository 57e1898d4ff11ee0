//! Bound states of two electrons in a planar harmonic quantum dot.
//!
//! The relative-motion radial equation `u'' = (V_eff − η) u` is solved by
//! Numerov shooting with node-counted bisection ([`eigensolver`]) and
//! cross-checked by a finite-difference Sturm-sequence solver ([`oracle`]).
//! [`scenarios`] runs the potential comparisons and writes figure data;
//! [`cli`] is the configuration and mode layer behind the binary.
//!
//! ```
//! use planar_qdot::eigensolver::{SolverConfig, Shooter};
//! use planar_qdot::numerov::RadialGrid;
//! use planar_qdot::potentials::{EffectiveProblem, PotentialSpec};
//!
//! let problem = EffectiveProblem::new(PotentialSpec::none(), 0.5, 2)?;
//! let grid = RadialGrid::with_spacing(0.01, 12.0, 1e-3)?;
//! let shooter = Shooter::new(&problem, &grid, &SolverConfig::default())?;
//! let state = shooter.ground_state(1.0, 4.0)?.unwrap();
//! assert!((state.eta - 3.0).abs() < 1e-7);
//! # Ok::<(), planar_qdot::Error>(())
//! ```

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod eigensolver;
pub mod error;
pub mod numerov;
pub mod oracle;
pub mod potentials;
pub mod scenarios;

pub use error::{Error, Result};

/// The guide's chapters, compiled so their examples run as doc-tests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/radial-equation.md")]
    pub struct RadialEquation;
    #[doc = include_str!("../../../book/src/numerov.md")]
    pub struct Numerov;
    #[doc = include_str!("../../../book/src/shooting.md")]
    pub struct Shooting;
    #[doc = include_str!("../../../book/src/cutoff.md")]
    pub struct Cutoff;
    #[doc = include_str!("../../../book/src/bessel-k0.md")]
    pub struct BesselK0;
    #[doc = include_str!("../../../book/src/oracle.md")]
    pub struct Oracle;
    #[doc = include_str!("../../../book/src/scenarios.md")]
    pub struct Scenarios;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
