use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of the stated degree")]
    BadModulus,
    #[error("modulus is reducible")]
    Reducible,
    #[error("field of size p^n exceeds 2^64")]
    FieldTooLarge,
    #[error("value {0} is not a field element")]
    NotAnElement(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("group order exceeds the configured bound")]
    OverBound,
    #[error("no orthogonal intertwiner exists")]
    NoIntertwiner,
    #[error("discrete logarithm does not exist")]
    NotFound,
    #[error("precondition failed: {0}")]
    Precondition(&'static str),
    #[error("search exhausted its budget")]
    Exhausted,
    #[error("no usable short word found within the enumeration cap")]
    EnumerationCap,
    #[error("no relation found within the search box")]
    NoRelation,
    #[error("produced words failed verification")]
    Verification,
    #[error("parse error: {0}")]
    Parse(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
