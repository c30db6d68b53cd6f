use thiserror::Error;

use crate::matk::MatK;
use crate::scalars::Algebra;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra tag mismatch: {left:?} vs {right:?}")]
    TagMismatch { left: Algebra, right: Algebra },

    #[error("operation not supported over {0:?}")]
    UnsupportedAlgebra(Algebra),

    #[error("probes do not form a real basis of {0:?}")]
    DegenerateProbe(Algebra),

    #[error("matrix is not hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("marking is zero")]
    ZeroMarking,

    #[error("probe table is missing the probe {0:?}")]
    IncompleteProbe(Vec<i64>),

    #[error("probe lengths are inconsistent: {0}")]
    InconsistentLengths(String),

    #[error("gram matrix is singular")]
    SingularGram,

    #[error("acting matrix is singular")]
    SingularAction,

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("lattice is not autodual")]
    NotAutodual,

    #[error("symplectic reduction failed: {0}")]
    ReductionFailure(String),

    #[error("family did not converge (last step {step:.3e})")]
    NoConvergence {
        step: f64,
        last: Box<MatK>,
        previous: Box<MatK>,
    },

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("invalid input: {0}")]
    Schema(String),
}
