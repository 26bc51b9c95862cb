use thiserror::Error;

use crate::series::SeriesError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("mean (first cumulant) vanishes: |kappa_1| = {0:e}")]
    ZeroMean(f64),
    #[error("first alternating cumulant vanishes: |alpha_1| = {0:e}")]
    ZeroFirstCumulant(f64),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("order {order} exceeds the enumeration cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },
    #[error("expected a {expected} transform, got {got}")]
    KindMismatch { expected: String, got: String },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("no root satisfies the Herglotz sign condition at x = {0}")]
    NoValidBranch(f64),
    #[error("argument {0} lies outside the declared analyticity region")]
    EvaluationDomain(String),
    #[error("both branches solve the equation at |w| = 0 and no branch rule was given")]
    AmbiguousBranch,
    #[error("no root of S(F - 1) = 1/s^2 inside the ring at s = {0}")]
    NoRoot(f64),
    #[error("S(F - 1) = 1/s^2 has {count} roots at s = {s}")]
    MultipleRoots { s: f64, count: usize },
    #[error("density diverges at s = {0}: S' vanishes")]
    EdgeSingularity(f64),
    #[error("variant {0} is not supported here")]
    UnsupportedVariant(String),
    #[error("integer overflow")]
    Overflow,
    #[error("eigenvector matrix is ill-conditioned (estimate {0:e})")]
    IllConditioned(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Whether the error is a violated precondition on the inputs, as opposed
    /// to a failure of a numerical solver.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Series(_)
                | Error::ZeroMean(_)
                | Error::ZeroFirstCumulant(_)
                | Error::InconsistentInput(_)
                | Error::OrderTooLarge { .. }
                | Error::KindMismatch { .. }
                | Error::UnsupportedVariant(_)
                | Error::InvalidInput(_)
                | Error::EvaluationDomain(_)
        )
    }
}
