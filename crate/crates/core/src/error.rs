use thiserror::Error;

/// Errors raised by construction, correlation and export routines.
///
/// Certificate and validation failures are not errors; they come back as
/// report values so callers can inspect the witnesses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus q={0} must be even and at least 2")]
    InvalidModulus(u32),
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index x{index} out of range for m={m}")]
    VariableOutOfRange { index: usize, m: usize },
    #[error("variable x{0} listed more than once")]
    DuplicateVariable(usize),
    #[error("too many variables: m={0} (at most 63 supported)")]
    TooManyVariables(usize),
    #[error("exponent {exponent} at position {position} is not reduced mod {q}")]
    ExponentOutOfRange { position: usize, exponent: u32, q: u32 },
    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sequence moduli differ: q={left} vs q={right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("shift {shift} out of range for length {len}")]
    ShiftOutOfRange { shift: i64, len: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("code shapes differ: {left_rows}x{left_len} vs {right_rows}x{right_len}")]
    ShapeMismatch {
        left_rows: usize,
        left_len: usize,
        right_rows: usize,
        right_len: usize,
    },
    #[error("function has a term of degree {0}; a quadratic form is required")]
    DegreeTooHigh(usize),
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("spectrum would hold {entries} entries, above the cap of {cap}")]
    SpectrumTooLarge { entries: usize, cap: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("simulation requires binary (q=2) signatures, got q={0}")]
    NonBinarySignatures(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
