use thiserror::Error;

/// Errors produced anywhere in the core crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),
    #[error("layout has {total} qubits, cap is {cap}")]
    TooManyQubits { total: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("register `{0}` appears in both selections")]
    OverlappingRegisters(String),
    #[error("empty register selection")]
    EmptySelection,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("value {value} outside {expected}")]
    OutOfRange { value: f64, expected: &'static str },
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("input length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("strategy kind mismatch: expected {0}")]
    KindMismatch(&'static str),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
