use thiserror::Error;

/// Errors raised by the library. Every variant is a domain error except
/// `Parse`, which is reserved for malformed input at the I/O boundary.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("not logarithmic at {0}")]
    NotLogarithmic(String),

    #[error("order undefined for the zero function")]
    OrderUndefined,

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("degree bound violated: {0}")]
    DegreeOverflow(String),

    #[error("residue at {0} is not nilpotent with respect to the parabolic direction")]
    NotNilpotent(String),

    #[error("line subbundle is not incident as claimed at {0}")]
    NotIncident(String),

    #[error("input is unstable")]
    Unstable,

    #[error("input is strictly semistable")]
    StrictlySemistable,

    #[error("elementary transformation mask has odd cardinality {0}")]
    OddMask(usize),

    #[error("re-splitting produced O(-{0}) + O({0}), outside the moduli range")]
    SplittingOutOfRange(i64),

    #[error("eigenvalue vector is not generic")]
    NotGeneric,

    #[error("divergent family: {0}")]
    DivergentFamily(String),

    #[error("pole outside the marked divisor: {0}")]
    PoleOutsideDivisor(String),

    #[error("non-simple pole at {0}")]
    NonSimplePole(String),

    #[error("trace is not zero")]
    NonzeroTrace,

    #[error("residue at {0} does not have eigenvalues +/-nu")]
    WrongEigenvalues(String),

    #[error("parabolic direction at {0} is not the nu-eigenspace")]
    WrongEigenspace(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
