//! Crate-wide error type.

/// Errors produced by any layer of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} unsupported; expected 2, 4, or 8")]
    UnsupportedDimension(usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("Bloch vector norm {0} exceeds 1")]
    OutsideBlochBall(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid subsystem mask: {0}")]
    InvalidMask(String),

    #[error("direction {index}: {msg}")]
    InvalidDirection { index: usize, msg: String },

    #[error("unknown direction family '{0}'; supported: {1}")]
    UnknownFamily(String, String),

    #[error("family '{family}' defines {expected} settings, but {requested} were requested")]
    FamilySize {
        family: String,
        expected: usize,
        requested: usize,
    },

    #[error("parse error in {source_name} line {line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("k = {k} out of range 0..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("heralding efficiency {0} outside (0, 1]")]
    InvalidEta(f64),

    #[error("measurement efficiency {0} outside [0, 1]")]
    InvalidEtaM(f64),

    #[error("degenerate preparation: <B,B> = {0} is not below n^2, r-factor denominator vanishes")]
    DegeneratePreparation(f64),

    #[error("n = {n} exceeds the {what} cap of {cap}; exhaustive enumeration refused")]
    TooManySettings { n: usize, what: String, cap: usize },

    #[error("invalid cheat strategy: {0}")]
    InvalidStrategy(String),

    #[error("no valid rounds: every round was null")]
    NoValidRounds,

    #[error("preparation report missing entry for (j = {j}, s = {s:+})")]
    MissingPreparation { j: usize, s: i8 },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
