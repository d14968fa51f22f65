use thiserror::Error;

/// Errors raised by the algebra engine. Most of them signal that an identity
/// which must hold exactly did not, and carry enough context to locate it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable context mismatch: {0}")]
    ContextMismatch(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("not an H4 invariant: {0}")]
    NotInvariant(String),
    #[error("partition must be non-increasing with at most four parts: {0:?}")]
    InvalidPartition(Vec<u32>),
    #[error("group closure exceeded {0} elements")]
    GroupOverflow(usize),
    #[error("orbit sums are not proportional to the explicit invariants: {0}")]
    InconsistentScales(String),
    #[error("gauge rotation left a nonzero free term: {0}")]
    NonzeroFreeTerm(String),
    #[error("integral does not have the ground state as eigenfunction: {0}")]
    FNotEigen(String),
    #[error("operator leaves the subspace: {0}")]
    NotInvariantSubspace(String),
    #[error("defective eigenvalue block: {0}")]
    DefectiveMatrix(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
