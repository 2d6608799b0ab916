use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: expected N = {expected}, found N = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid with N = {n} cannot be coarsened to N0 = {coarsest} by repeated halving")]
    NonConformingGrid { n: usize, coarsest: usize },

    #[error("shift incompatible with Vanka patch: eta = {eta} makes the local element matrix singular")]
    ShiftIncompatible { eta: Complex64 },

    #[error("level {level} (h = 1/{n}): {source}")]
    Level {
        level: usize,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular coarse operator (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularOperator { pivot: f64, threshold: f64 },

    #[error("eigensolver failed to converge after {iterations} QR sweeps")]
    EigenNoConvergence { iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate LFA configuration: every sampled frequency was skipped")]
    DegenerateLfa,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time scheme {0} has no time-discretization matrix")]
    NoTimeMatrix(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SingularOperator { .. }
            | Error::EigenNoConvergence { .. }
            | Error::ShiftIncompatible { .. }
            | Error::DegenerateLfa => true,
            Error::Level { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
