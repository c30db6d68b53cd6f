//! Marked lattices over ℝ, ℂ, ℍ and 𝕆.
//!
//! Length functions on lattice points, their Satake realization as classes of
//! positive hermitian matrices, self-dual symplectic lattices and the
//! splitting calculus for boundary length functions.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod cli;
pub mod dense;
pub mod error;
pub mod field;
pub mod harness;
pub mod io;
pub mod lattices;
pub mod matk;
pub mod octo;
pub mod sampling;
pub mod scalars;
pub mod strata;
pub mod symplectic;

pub use error::{Error, Result};
pub use field::Rational;
pub use scalars::{Algebra, Scalar};
