use thiserror::Error;

/// Errors produced by the steering toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("nothing to trace out")]
    NothingToTraceOut,

    #[error("invalid subsystem selection for a {qubits}-qubit matrix")]
    InvalidSubsystem { qubits: usize },

    #[error("hermitian required (residual {0:e})")]
    HermitianRequired(f64),

    #[error("not PSD (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("bloch out of range: {0}")]
    BlochOutOfRange(String),

    #[error("invalid X-state parameters (min eigenvalue {0:e})")]
    InvalidXState(f64),

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid witness index (k={k}, i={i}, j={j})")]
    InvalidWitnessIndex { k: u8, i: u8, j: u8 },

    #[error("bob axes must be orthogonal (overlap {0:e})")]
    NonOrthogonalAxes(f64),

    #[error("direction is not a unit vector (norm {0})")]
    NotUnitVector(f64),

    #[error("no threshold in range")]
    NoThreshold,

    #[error("criterion is not monotone on [0, 1] ({0} sign changes)")]
    NotMonotone(usize),

    #[error("internal consistency error: imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
