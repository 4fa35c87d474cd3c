use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point {0} lies outside the domain {1}")]
    OutOfDomain(String, String),
    #[error("domains do not overlap in a nondegenerate interval")]
    EmptyIntersection,
    #[error("zero polynomial has no Gauss valuation")]
    ZeroPolynomial,
    #[error("duplicate exponent {0}")]
    DuplicateExponent(i64),
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0} is divisible by p = {1}")]
    DivisibleByP(i64, u32),
    #[error("no Frobenius antecedent on {0}")]
    NoAntecedent(String),
    #[error("profile entry {0} is not exact on the requested interval")]
    NotExact(usize),
    #[error("comparison depends on the unseen tail of a nested-disc sequence")]
    UndecidableFromPrefix,
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
