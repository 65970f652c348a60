use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `gamma == 1` makes `sign(1 - gamma^2)` vanish and the conversion formulas degenerate.
    #[error("degenerate anisotropy: gamma = {gamma} (gamma must differ from 1)")]
    DegenerateAnisotropy { gamma: f64 },

    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),

    /// The evaluation point is within the singularity floor of a wavefunction node.
    #[error("nodal singularity: |node| = {magnitude:e} is below the floor {floor:e}")]
    NodalSingularity { magnitude: f64, floor: f64 },

    #[error("hypergeometric series does not terminate for a = {a}, b = {b}, c = {c}")]
    NonTerminatingSeries { a: f64, b: f64, c: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trajectories are sampled on different grids")]
    MismatchedGrids,

    #[error("sliding surface is uncontrollable: C*K = {ck}")]
    UncontrollableSurface { ck: f64 },

    #[error("invalid controller configuration: {0}")]
    InvalidController(String),

    #[error("series too short: {len} samples, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("largest Lyapunov exponent undefined: {0}")]
    UndefinedExponent(String),

    #[error("config error in [{section}] key `{key}`: {message}")]
    Config {
        section: String,
        key: String,
        message: String,
    },

    #[error("config syntax error: {0}")]
    ConfigSyntax(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    pub fn is_singularity(&self) -> bool {
        matches!(self, Error::NodalSingularity { .. })
    }
}
