//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("state is not normalized: squared amplitudes sum to {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("duplicate basis state {bitstring:?}")]
    DuplicateBasisState { bitstring: String },

    #[error("bad bitstring {bitstring:?}: {reason}")]
    BadBitstring { bitstring: String, reason: String },

    #[error("{n} qubits exceeds the {max}-qubit cap")]
    TooManyQubits { n: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate qubit index {index} in subset")]
    DuplicateIndex { index: usize },

    #[error("subset of {size} qubits exceeds the cap of {cap}")]
    SubsetTooLarge { size: usize, cap: usize },

    #[error("order k = {k} outside the supported range 1..={max}")]
    InvalidOrder { k: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },

    #[error("term {term} does not cover qubits 1..={n} exactly once: {message}")]
    QubitCoverage { term: usize, n: usize, message: String },

    #[error("line {line}: ket {ket:?} has {got} bits but the block lists {want} qubits")]
    BlockWidthMismatch { line: usize, ket: String, got: usize, want: usize },

    #[error("non-Hermitian residue {imag} in Pauli expectation")]
    NonHermitianResidue { imag: f64 },

    #[error("duplicate row {row:?} in orthogonal array")]
    DuplicateRow { row: String },

    #[error("malformed orthogonal array at line {line}: {message}")]
    MalformedArray { line: usize, message: String },

    #[error("malformed sign vector: {message}")]
    MalformedSigns { message: String },

    #[error("state amplitudes are not all of magnitude 1/sqrt(support size) with ±1 phases")]
    NotUniformMagnitude,

    #[error("support of {rows} rows exceeds the exhaustive budget of {max_rows}")]
    SupportTooLarge { rows: usize, max_rows: usize },

    #[error("unknown catalog id {id:?}")]
    UnknownId { id: String },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
