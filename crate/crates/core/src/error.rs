//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised while building models, solving for Chebyshev points,
/// constructing designs or verifying them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the design interval.
    #[error("t = {t} lies outside the design interval")]
    Domain { t: f64 },

    /// A basis function is singular (or non-finite) at the given point.
    #[error("regression functions are singular at t = {t}")]
    Singular { t: f64 },

    /// A model or algorithm parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iteration (Remez exchange, oracle) did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The functions do not behave like a Chebyshev system on the interval.
    #[error("Chebyshev property violated: {0}")]
    ChebyshevViolation(String),

    /// A weight of the Elfving representation is negative.
    #[error("negative weight {weight:e} at Chebyshev point {index}")]
    NegativeWeight { index: usize, weight: f64 },

    /// An information matrix is (numerically) singular.
    #[error("information matrix has rank {rank} < {order}")]
    RankDeficient { rank: usize, order: usize },

    /// The vector c is not in the range of the information matrix.
    #[error("c is not estimable under the design (range residual {residual:e})")]
    NotEstimable { residual: f64 },

    /// A design violates its invariants.
    #[error("invalid design: {0}")]
    Design(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The closed-form Chebyshev points could not be determined.
    #[error("closed-form Chebyshev points: {0}")]
    ClosedForm(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
