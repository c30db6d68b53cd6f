//! Coefficient fields for scalar coordinates.
//!
//! Every algebraic routine in this crate is generic over [`Field`] so that the
//! same code runs on `f64` (numerical path) and on [`Rational`] (exact path).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and equality checks need no tolerance.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    /// Integer test; always false for inexact fields.
    fn is_integer(&self) -> bool;
    /// Zero test. Exact for rationals; for floats `|x| <= tol * scale`.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool;
}

impl Field for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        Field::to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_integer(&self) -> bool {
        false
    }
    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale.max(f64::MIN_POSITIVE)
    }
}

impl Field for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        Field::to_f64(&self.abs())
    }
    fn is_integer(&self) -> bool {
        BigRational::is_integer(self)
    }
    fn is_negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }
}

/// Exact rational from an `f64` (the binary value, no rounding).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}
