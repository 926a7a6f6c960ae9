use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    RepeatedQubit(usize),

    #[error("non-finite angle {0}")]
    NonFiniteAngle(f64),

    #[error("register of {0} qubits exceeds the {max}-qubit cap", max = crate::quantum::MAX_QUBITS)]
    RegisterTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("readout qubit list is empty")]
    EmptyReadout,

    #[error("vector is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("vector is degenerate (zero norm) and cannot be normalized")]
    DegenerateVector,

    #[error("{features} features do not fit in {capacity} slots")]
    DimensionOverflow { features: usize, capacity: usize },

    #[error("CNOT between non-adjacent wires {0} and {1}")]
    NonAdjacentCnot(usize, usize),

    #[error("gate {0} is not supported here")]
    UnsupportedGate(String),

    #[error("exact evaluation explored more than {0} branch nodes")]
    BranchCapExceeded(usize),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed {what} at line {line}: {reason}")]
    Parse {
        what: &'static str,
        line: usize,
        reason: String,
    },

    #[error("bad IDX file {path}: {reason}")]
    Idx { path: PathBuf, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
