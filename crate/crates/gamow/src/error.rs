use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong inside the numerical core.
///
/// The variants are coarse on purpose: callers mostly need to know whether
/// they asked for something outside the domain, hit a pole, or ran out of
/// convergence budget. The CLI maps them onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GamowError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("momentum {p} is too close to a resonance pole (|D| = {residual:.3e})")]
    PoleProximity { p: Complex64, residual: f64 },

    #[error("momentum {p} sits on the removable singularity p = ±k; use the series route")]
    NearIncidentMomentum { p: Complex64 },

    #[error("root search failed in box [{re_lo}, {re_hi}] x [{im_lo}, {im_hi}]: {reason}")]
    Convergence {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
        reason: String,
    },

    #[error("a zero of D lies within {distance:.3e} of the counting contour")]
    BoundaryTooClose { distance: f64 },

    #[error("winding number {winding} is not an integer; refine boundary sampling")]
    NonIntegerWinding { winding: f64 },

    #[error("quadrature tolerance {requested:.3e} not met (estimate {achieved:.3e})")]
    Tolerance { requested: f64, achieved: f64 },

    #[error("tail rotation would sweep past the resonance at {pole}")]
    PoleSweep { pole: Complex64 },

    #[error("need {needed} pole pairs but only {available} were supplied")]
    InsufficientPoles { needed: usize, available: usize },

    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GamowError>;

impl From<std::io::Error> for GamowError {
    fn from(e: std::io::Error) -> Self {
        GamowError::Io(e.to_string())
    }
}
