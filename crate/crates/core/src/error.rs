use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("invalid Pauli string {0:?}")]
    ParsePauli(String),

    #[error("generators are linearly dependent")]
    DependentGenerators,

    #[error("generators do not pairwise commute")]
    NotIsotropic,

    #[error("too many generators for a stabilizer group on {n} qubits: {count}")]
    TooManyGenerators { n: usize, count: usize },

    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("{0} is not an element of the group")]
    NotInGroup(String),

    #[error("{0} is not covered by any group")]
    NotCovered(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("missing marginal for factor {0}")]
    MissingMarginal(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
