use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: j_max = {j_max} is smaller than |m| = {m_abs}")]
    InvalidBasis { j_max: i64, m_abs: i64 },

    #[error("associated Legendre function undefined for j = {j} < |m| = {m_abs}")]
    LegendreDomain { j: i64, m_abs: i64 },

    #[error("quadrature with {n_nodes} nodes cannot resolve j_max = {j_max} (need at least {required})")]
    InsufficientQuadrature {
        n_nodes: usize,
        j_max: usize,
        required: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quantum number j = {j} outside basis range {j_min}..={j_max}")]
    StateOutOfBasis { j: usize, j_min: usize, j_max: usize },

    #[error("instantaneous field is undefined in cycle-averaged mode")]
    CycleAveragedField,

    #[error("invalid field configuration: {0}")]
    InvalidField(String),

    #[error("invalid propagation plan: {0}")]
    InvalidPlan(String),

    #[error("oracle integrator limited to basis dimension {limit}, got {dim}")]
    OracleTooLarge { dim: usize, limit: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("invalid physical input: {0}")]
    InvalidPhysical(String),

    #[error(transparent)]
    Config(#[from] crate::io::config::ConfigError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("malformed CSV {}: {reason}", path.display())]
    CsvFormat { path: PathBuf, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
