use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown distribution `{0}` (expected gaussian, laplace, t3 or subexp:ETA)")]
    UnknownDistribution(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("intervals overlap: [{0}, {1}] and [{2}, {3}]")]
    OverlappingIntervals(f64, f64, f64, f64),

    #[error("observation x = {x} lies in the atom region |x| <= t_alpha; the credible set is {{0}} only")]
    AtomRegion { x: f64 },

    #[error("empty grid")]
    EmptyGrid,

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("fixed-point iterates stopped increasing at step {step}: {prev} -> {next}")]
    NonMonotoneIterates { step: usize, prev: f64, next: f64 },

    #[error("operation requires the slab-only prior (w = 1), got w = {0}")]
    RequiresSlabOnly(f64),

    #[error("x = {x} was not selected (|x| < lambda = {lambda})")]
    NotSelected { x: f64, lambda: f64 },

    #[error("no roots found for target {target}: {reason}")]
    EmptyInverse { target: f64, reason: &'static str },

    #[error("no draws passed the selection event")]
    NoAcceptedDraws,

    #[error("tail-decay constants are not available for distribution `{0}`")]
    NoTailParameters(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
