use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("pole: denominator vanishes at Q = {0}")]
    Pole(String),

    #[error("{what} {value} out of range {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        lo: usize,
        hi: usize,
    },

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("block {0:?} is not a block of the partition")]
    BlockNotInPartition(Vec<usize>),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("normal form is a crossing partition {0:?}; input diagram is not planar")]
    NonPlanar(Vec<Vec<usize>>),

    #[error("order {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
