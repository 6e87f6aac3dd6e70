use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("target qubits must be distinct")]
    DuplicateTargets,

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires a {expected}-qubit state, got {got} qubits")]
    WrongQubitCount { expected: usize, got: usize },

    #[error("keep set must be non-empty and strictly increasing")]
    BadKeepSet,

    #[error("{name} = {value} outside valid range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("register of {requested} qubits exceeds the exact-simulation cap of {cap}")]
    RegisterCapExceeded { requested: usize, cap: usize },

    #[error("bus length l = {l} must be an even integer >= 2")]
    BadBusLength { l: usize },

    #[error("error model {model} is not supported by the Bell-diagonal fast path")]
    UnsupportedErrorModel { model: &'static str },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("segmentation inconsistent: {0}")]
    BadSegmentation(String),
}
