use thiserror::Error;

/// Errors produced by the spectral, integral and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid resolution N={0}: need N >= 2")]
    InvalidResolution(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("coordinate {value} outside [{lower}, {upper}]")]
    OutOfRange { value: f64, lower: f64, upper: f64 },

    #[error("invalid rational order: {0}")]
    InvalidOrder(String),

    #[error("invalid domain partition: {0}")]
    InvalidPartition(String),

    #[error("invalid torus grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in sub-integral {piece} at {domain} coordinate {coord}")]
    NumericalDomain {
        piece: &'static str,
        domain: &'static str,
        coord: f64,
    },

    #[error("inverse transform left an imaginary part of {residue:e} (tolerance {limit:e})")]
    ImaginaryResidue { residue: f64, limit: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::Dimension { expected, got })
    } else {
        Ok(())
    }
}
