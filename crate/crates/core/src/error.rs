//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by operator construction, simulation, filtering and I/O.
#[derive(Debug, Error)]
pub enum QaraError {
    #[error("operator dimension mismatch: {left} qubits vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCountOutOfRange { n: usize, min: usize, max: usize },

    #[error("window length {0} is not a power of two (or is < 2)")]
    InvalidWindowLength(usize),

    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: u32 },

    #[error(
        "window contains duplicate values and unique mode is off; the closed-form \
         index distribution requires pairwise-distinct data words (duplicates make \
         counter branches interfere). Enable unique mode to append index bits."
    )]
    DuplicateValues,

    #[error(
        "register of {qubits} qubits exceeds the {max}-qubit statevector limit; \
         use the branch backend (simulate_branches) for windows of this size"
    )]
    RegisterTooLarge { qubits: usize, max: usize },

    #[error(
        "extra control qubit {qubit} overlaps the gate list's register (size {register_size})"
    )]
    ControlOverlap { qubit: usize, register_size: usize },

    #[error("signal of {len} samples is shorter than the window ({window})")]
    SignalTooShort { len: usize, window: usize },

    #[error("image width {width} is narrower than the window ({window})")]
    ImageTooNarrow { width: usize, window: usize },

    #[error("shape mismatch: {left} vs {right} elements")]
    ShapeMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed PGM header: {0}")]
    PgmMalformedHeader(String),

    #[error("unsupported PGM maxval {0} (only 8-bit, maxval 255, is supported)")]
    PgmUnsupportedMaxval(u32),

    #[error("truncated PGM payload: expected {expected} bytes, found {found}")]
    PgmTruncated { expected: usize, found: usize },

    #[error("CSV parse error at line {line}: {token:?} is not an integer")]
    CsvParse { line: usize, token: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QaraError>;
