use thiserror::Error;

/// Errors raised by the algebra, cocycle and index routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("exponential needs a series with zero constant term")]
    NonZeroConstantTerm,
    #[error("scalar level {0} does not contain i; complex coordinates need a level divisible by 4")]
    NoImaginaryUnit(u32),
    #[error("Weyl elements disagree on shape: {0}")]
    BasisMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix does not have finite order up to {0}")]
    InfiniteOrder(u32),
    #[error("element is not a homogeneous quadratic: {0}")]
    NotQuadratic(String),
    #[error("normal part has eigenvalue 1")]
    EigenvalueOne,
    #[error("cyclotomic level {0} too small to split the element; raise the level")]
    RaiseLevel(u32),
    #[error("tensor slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("argument leaves the fixed-space Weyl algebra: {0}")]
    OutsideFixedAlgebra(String),
    #[error("element is not in the subalgebra h: {0}")]
    NotInSubalgebra(String),
    #[error("twisted trace needs complex coordinates on every normal pair")]
    RealBasisInput,
    #[error("no polynomial trace on sector {0}: fixed space has positive dimension")]
    SectorHasFixedDirections(String),
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("missing data: {0}")]
    Missing(String),
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("odd-degree class where an even one is required: {0}")]
    OddDegree(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
    Unsupported,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::Schema { .. } => ErrorKind::Input,
            Error::Unsupported(_) => ErrorKind::Unsupported,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
