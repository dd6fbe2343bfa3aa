//! Error types shared across the crate.

use thiserror::Error;

/// Errors from the exact matrix kernel.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix dimensions must be positive")]
    ZeroDimension,
    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("column index {index} out of range 1..={rows}")]
    ColumnIndex { index: usize, rows: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
}

/// Parse / resolution errors for the network DSL. Every error carries the
/// 1-based source line it was detected on.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

/// Errors from the network model (domains, operators, index codecs).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("domain size must be at least 2, got {k}")]
    DomainSize { k: usize },
    #[error("value {value} is not in D_{k}")]
    OutOfDomain { value: String, k: usize },
    #[error("component count {got} does not match the {expected} declared variables")]
    Arity { got: usize, expected: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexRange { index: usize, max: usize },
    #[error("operator {name}: table needs {expected} entries, got {got}")]
    TableLength { name: String, expected: usize, got: usize },
    #[error("operator {name}: table entry out of range 1..={out_k}")]
    TableIndex { name: String, out_k: usize },
    #[error("expression must not reference control variables")]
    ControlsInStateFormula,
}

/// Errors from the Ledley machinery (truth matrices, subset solutions).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LedleyError {
    #[error("transition matrix has {cols} columns, not a multiple of the {n} states")]
    ColumnCount { cols: usize, n: usize },
    #[error("state set universe {universe} does not match the {n} states")]
    UniverseMismatch { universe: usize, n: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("state index {index} out of range 1..={n}")]
    StateIndex { index: usize, n: usize },
}

/// Errors from stabilizer synthesis (bad inputs; unsolvable instances are a
/// regular outcome, not an error).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error(transparent)]
    Ledley(#[from] LedleyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("target state {index} out of range 1..={n}")]
    TargetRange { index: usize, n: usize },
    #[error("target set must not be empty")]
    EmptyTarget,
    #[error("enumeration limit must be positive")]
    ZeroLimit,
    #[error("control radices {radices:?} do not multiply to the {rows} law rows")]
    RadixMismatch { radices: Vec<usize>, rows: usize },
    #[error("feedback law has {got} columns, expected {expected}")]
    LawShape { got: usize, expected: usize },
    #[error("formula extraction requires Boolean domains, found k={k}")]
    NonBooleanDomain { k: usize },
}
