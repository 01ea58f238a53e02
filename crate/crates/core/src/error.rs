use thiserror::Error;

/// Errors raised by the library. Each variant belongs to one [`ErrorKind`],
/// which front ends map onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero undefined")]
    ValuationOfZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("not a unit: gcd({a}, {m}) != 1")]
    NotAUnit { a: i64, m: u64 },
    #[error("conductor too large: {0} (supported range 2..=100000)")]
    ConductorTooLarge(u64),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element {0:?} is not a valid element of the group")]
    InvalidElement(Vec<u64>),
    #[error("characters live on different groups")]
    GroupMismatch,
    #[error("ℓ divides group order ({order} is divisible by {ell})")]
    EllDividesOrder { ell: u64, order: u64 },
    #[error("complex conjugation image does not square to the identity")]
    TauBarNotInvolution,
    #[error("virtual character is not Frobenius-stable for ℓ = {0}")]
    NotFrobeniusStable(u64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field does not contain ℓ-th roots of unity")]
    MissingRootsOfUnity,
    #[error("wild prime has no tame splitting exponent")]
    WildPrime,
    #[error("S must be a set (prime {0} repeated)")]
    DuplicatePrime(u64),
    #[error("S must be tame (contains ℓ = {0})")]
    WildPrimeInTameSet(u64),
    #[error("wild case requires ℓ ∈ S")]
    WildCaseRequiresEll,
    #[error("hypotheses of reflection theorem violated: {0}")]
    ReflectionHypotheses(String),
    #[error("increase n_max: splitting exponent not stable by level {0}")]
    IncreaseNMax(u32),
    #[error("oracle scale exceeded: {0}")]
    OracleScaleExceeded(String),
    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("not a distinguished polynomial: {0}")]
    NotDistinguished(String),
    #[error("level table needs at least 4 consecutive levels: {0}")]
    InsufficientLevels(String),
    #[error("inconsistent ambiguous-class data: formula gives {0}")]
    InconsistentAmbiguousData(i64),
    #[error("invalid Γ-module: {0}")]
    InvalidModule(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidField,
    InvalidPrimeSet,
    ScaleExceeded,
    InconsistentData,
    InvalidInput,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            ConductorTooLarge(_) | EllDividesOrder { .. } | TauBarNotInvolution
            | InvalidField(_) | MissingRootsOfUnity => ErrorKind::InvalidField,
            NotPrime(_) | WildPrime | DuplicatePrime(_) | WildPrimeInTameSet(_)
            | WildCaseRequiresEll | ReflectionHypotheses(_) => ErrorKind::InvalidPrimeSet,
            IncreaseNMax(_) | OracleScaleExceeded(_) | ScaleExceeded(_) => {
                ErrorKind::ScaleExceeded
            }
            InconsistentAmbiguousData(_) => ErrorKind::InconsistentData,
            ValuationOfZero | NotAUnit { .. } | InvalidGroup(_) | InvalidElement(_)
            | GroupMismatch | NotFrobeniusStable(_) | NotDistinguished(_)
            | InsufficientLevels(_) | InvalidModule(_) => ErrorKind::InvalidInput,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
