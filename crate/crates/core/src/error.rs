use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants are coarse on purpose: the CLI maps them onto exit codes
/// (`Parse`/`Scenario` → 2, `Precondition`/`MixedPrimes`/`Singular`/... → 3,
/// `Resource` → 4).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is rank deficient (rank {rank}, needed {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("lattice is not contained in the reference lattice")]
    NotContained,
    #[error("operands belong to different quaternion algebras")]
    AlgebraMismatch,
    #[error("invalid place: {0}")]
    InvalidPlace(String),
    #[error("vertices live in trees for different primes ({0} and {1})")]
    MixedPrimes(u64, u64),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {}", .0.join("; "))]
    Scenario(Vec<String>),
    #[error("scenario inconsistency: {0}")]
    Inconsistent(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
