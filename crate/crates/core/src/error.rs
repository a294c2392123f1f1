use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variance must be positive and finite, got {0}")]
    InvalidVariance(f64),

    #[error("squeezing must be finite, got {0} dB")]
    InvalidSqueezing(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate entry ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("X check {x_row} anticommutes with Z check {z_row}")]
    Commutation { x_row: usize, z_row: usize },

    #[error("shift exponent {exponent} out of range for lift size {lift_size}")]
    ExponentOutOfRange { exponent: usize, lift_size: usize },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {cause}")]
    Io { path: PathBuf, cause: std::io::Error },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("check matrix for the {0} basis is empty")]
    EmptyCheckMatrix(&'static str),

    #[error("fault location not part of the circuit: {0}")]
    InvalidLocation(String),

    #[error("real-time LLRs need a fault sample with residues")]
    MissingResidues,

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause: source,
        }
    }
}
