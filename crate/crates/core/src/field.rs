//! Arithmetic shared by every recurrence map.
//!
//! The maps in [`crate::dpainleve`] are written once against [`Field`] and
//! evaluated over multiprecision floats (forward iteration), exact rationals
//! (residual checks), and truncated Laurent series (singularity confinement).

use std::cmp::Ordering;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::mpnum::ExactReal;

pub trait Field: Clone {
    /// The constant `v` in the same context (precision, truncation) as `self`.
    fn embed(&self, v: &ExactReal) -> Result<Self>;
    fn int(&self, n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Fails with [`Error::ZeroPivot`] (or a truncation error for series)
    /// when the divisor vanishes.
    fn div(&self, other: &Self) -> Result<Self>;

    fn rational(&self, r: &Rational) -> Result<Self> {
        self.embed(&ExactReal::rational(r.clone()))
    }

    fn neg(&self) -> Self {
        self.int(0).sub(self)
    }

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn recip(&self) -> Result<Self> {
        self.int(1).div(self)
    }

    fn powi(&self, k: i64) -> Result<Self> {
        let mut result = self.int(1);
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        if k < 0 {
            result.recip()
        } else {
            Ok(result)
        }
    }
}

impl Field for Float {
    fn embed(&self, v: &ExactReal) -> Result<Self> {
        Ok(v.to_float(self.prec()))
    }

    fn int(&self, n: i64) -> Self {
        Float::with_val(self.prec(), n)
    }

    fn add(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self + other)
    }

    fn sub(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self - other)
    }

    fn mul(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self * other)
    }

    fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroPivot);
        }
        Ok(Float::with_val(self.prec().max(other.prec()), self / other))
    }

    fn powi(&self, k: i64) -> Result<Self> {
        if k < 0 && self.is_zero() {
            return Err(Error::ZeroPivot);
        }
        let k = i32::try_from(k).map_err(|_| Error::domain("exponent out of range"))?;
        Ok(Float::with_val(self.prec(), rug::ops::Pow::pow(self, k)))
    }
}

impl Field for Rational {
    fn embed(&self, v: &ExactReal) -> Result<Self> {
        v.as_rational()
            .ok_or_else(|| Error::domain(format!("parameter {v} is irrational; exact arithmetic needs a rational value")))
    }

    fn int(&self, n: i64) -> Self {
        Rational::from(n)
    }

    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }

    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }

    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }

    fn div(&self, other: &Self) -> Result<Self> {
        if other.cmp0() == Ordering::Equal {
            return Err(Error::ZeroPivot);
        }
        Ok(Rational::from(self / other))
    }
}
