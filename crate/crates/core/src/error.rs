use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus {q} exceeds the configured cap {cap}")]
    ModulusTooLarge { q: u64, cap: u64 },
    #[error("{residue} is not a unit modulo {q}")]
    NotAUnit { q: u64, residue: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("({a}, {b}) is not a good pair modulo {q}")]
    BadPair { q: u64, a: u64, b: u64 },
    #[error("enumeration of 2^{exponent} CM types exceeds the bound 2^{bound}")]
    DomainTooLarge { exponent: u64, bound: u64 },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
