use thiserror::Error;

/// Errors raised while parsing or validating user input.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("vertex index {index} out of range 1..={m}")]
    VertexOutOfRange { index: i64, m: usize },
    #[error("duplicate vertex {index} within a facet")]
    DuplicateVertex { index: usize },
    #[error("index sets overlap: {0:?}")]
    OverlappingIndexSets(Vec<usize>),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("shift vector has length {got}, expected {expected}")]
    ShiftLengthMismatch { got: usize, expected: usize },
    #[error("shift vectors differ mod 2 at vertex {vertex}")]
    ShiftParityMismatch { vertex: usize },
    #[error("invalid pair family: {0}")]
    PairFamily(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A model exceeded the configured simplex budget.
#[derive(Debug, Error)]
#[error("size budget exceeded: model needs more than {budget} simplices ({context})")]
pub struct BudgetError {
    pub budget: usize,
    pub context: String,
}
