use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e} (residual {residual:e})")]
    QuadratureNonConvergence { tol: f64, residual: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("requested index {requested} beyond table horizon {horizon}")]
    Horizon { requested: usize, horizon: usize },

    #[error("lattice of {cells} cells exceeds the memory bound of {bound} cells")]
    MemoryBound { cells: usize, bound: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("exact tied-down path supports d = 2 only, got d = {0}")]
    Dimension(usize),

    #[error("negative convolution residue {0:e} below the clamping floor")]
    NegativeResidue(f64),

    #[error("acceptance rate fell below the configured floor {floor:e} ({accepted} accepted in {trials} trials)")]
    Timeout {
        floor: f64,
        accepted: u64,
        trials: u64,
    },

    #[error("bisection bracket failed: {0}")]
    RootNotFound(String),

    #[error("orbit left [0,1] by more than 1e-12 at step {step}")]
    NumericalEscape { step: u64 },

    #[error("no closed-form invariant density for map `{0}`")]
    UnsupportedMap(String),

    #[error("empty distribution: {0}")]
    EmptyDistribution(String),

    #[error("nonpositive value in tail sequence at index {0}")]
    NonpositiveValue(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
