//! The scalar algebra shared by plain reals and jets.

use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Division guard: denominators below this magnitude are rejected.
pub const MIN_DIVISOR: f64 = 1e-300;

/// A commutative scalar algebra with the elementary functions needed by
/// chart expressions.
///
/// Implemented by `f64` and by [`Jet<T>`](crate::Jet) for any `T: Scalar`, so
/// jets can be nested to take derivatives of derivatives.
pub trait Scalar:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// The innermost real constant term.
    fn real(&self) -> f64;

    /// A constant of the same shape as `self`.
    fn constant_like(&self, value: f64) -> Self;

    fn scale(&self, factor: f64) -> Self;

    fn is_zero(&self) -> bool;

    /// Whether `self` and `other` live in the same algebra.
    fn compatible(&self, _other: &Self) -> bool {
        true
    }

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self);

    fn recip(&self) -> Result<Self>;

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.recip()?)
    }

    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self>;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Result<Self>;
    fn atan(&self) -> Self;
    fn sqrt(&self) -> Result<Self>;
    fn powf(&self, exponent: f64) -> Result<Self>;

    fn powi(&self, exponent: i32) -> Result<Self> {
        let mut base = self.clone();
        let mut e = exponent.unsigned_abs();
        let mut acc = self.constant_like(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        if exponent < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }
}

impl Scalar for f64 {
    fn real(&self) -> f64 {
        *self
    }

    fn constant_like(&self, value: f64) -> Self {
        value
    }

    fn scale(&self, factor: f64) -> Self {
        self * factor
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn recip(&self) -> Result<Self> {
        if self.abs() < MIN_DIVISOR {
            return Err(Error::DivisionByZero(*self));
        }
        Ok(1.0 / self)
    }

    fn exp(&self) -> Self {
        libm::exp(*self)
    }

    fn ln(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::Domain {
                func: "log",
                value: *self,
            });
        }
        Ok(libm::log(*self))
    }

    fn sin(&self) -> Self {
        libm::sin(*self)
    }

    fn cos(&self) -> Self {
        libm::cos(*self)
    }

    fn tan(&self) -> Result<Self> {
        if libm::cos(*self).abs() < MIN_DIVISOR {
            return Err(Error::Domain {
                func: "tan",
                value: *self,
            });
        }
        Ok(libm::tan(*self))
    }

    fn atan(&self) -> Self {
        libm::atan(*self)
    }

    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Domain {
                func: "sqrt",
                value: *self,
            });
        }
        Ok(libm::sqrt(*self))
    }

    fn powf(&self, exponent: f64) -> Result<Self> {
        if *self < 0.0 && libm::trunc(exponent) != exponent {
            return Err(Error::Domain {
                func: "pow",
                value: *self,
            });
        }
        if *self == 0.0 && exponent < 0.0 {
            return Err(Error::DivisionByZero(0.0));
        }
        Ok(libm::pow(*self, exponent))
    }
}
