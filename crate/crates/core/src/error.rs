use std::fmt;

/// Direction of a Numerov sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Outward,
    Inward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Outward => f.write_str("outward"),
            Direction::Inward => f.write_str("inward"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error(
        "grid too small: V_eff(r_max = {r_max}) = {v_eff} does not exceed eta = {eta}; \
         increase r_max so the outer boundary is classically forbidden"
    )]
    GridTooSmall { r_max: f64, v_eff: f64, eta: f64 },

    #[error("{direction} Numerov sweep produced a non-finite value at index {index}")]
    IntegratorFault { direction: Direction, index: usize },

    #[error("propagation failed at eta = {eta} ({direction} sweep, index {index})")]
    Propagation {
        eta: f64,
        direction: Direction,
        index: usize,
    },

    #[error(
        "bisection did not reach tolerance after {iterations} iterations; \
         final bracket [{lo}, {hi}]"
    )]
    NoConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("bracket [{lo}, {hi}] does not straddle an eigenvalue")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("cannot normalize a wavefunction with zero norm")]
    ZeroNorm,

    #[error("requested {k} eigenvalues from an operator of size {size}")]
    OutOfRange { k: usize, size: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "radius must be positive and finite",
            value: r,
        })
    }
}
