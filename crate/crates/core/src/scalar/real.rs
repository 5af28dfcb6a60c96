//! Configurable-precision real scalar backed by MPFR.
//!
//! Every value carries its own working precision. Binary operations round
//! once, correctly, to the smaller of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Smallest working precision accepted, in bits.
pub const MIN_PRECISION: u32 = 53;

#[derive(Clone)]
pub struct Real(Float);

impl Real {
    pub fn from_float(value: Float) -> Self {
        Real(value)
    }

    pub fn zero(prec: u32) -> Self {
        Real(Float::new(prec.max(MIN_PRECISION)))
    }

    pub fn one(prec: u32) -> Self {
        Real::from_i64(1, prec)
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), value))
    }

    pub fn from_f64(value: f64, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), value))
    }

    pub fn from_rational(value: &Rational, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), value))
    }

    /// Reads an `f64` through its shortest decimal form, so `4.4` means 4.4
    /// at any precision rather than the nearest double.
    pub fn from_f64_decimal(value: f64, prec: u32) -> Self {
        Real::parse(&format!("{value}"), prec).unwrap_or_else(|_| Real::from_f64(value, prec))
    }

    /// Parses a decimal string (e.g. `"-1.25e-3"`) rounded to `prec` bits.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| Error::Invalid(format!("cannot parse '{}' as a real: {e}", text.trim())))?;
        Ok(Real(Float::with_val(prec.max(MIN_PRECISION), parsed)))
    }

    pub fn pi(prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), Constant::Pi))
    }

    /// Euler–Mascheroni constant.
    pub fn euler(prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), Constant::Euler))
    }

    pub fn ln2(prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), Constant::Log2))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Rounds (or widens) to a new working precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Real(Float::with_val(prec.max(MIN_PRECISION), &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_positive()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Self {
        Real(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        Real(self.0.clone().ln())
    }

    pub fn sin(&self) -> Self {
        Real(self.0.clone().sin())
    }

    pub fn cos(&self) -> Self {
        Real(self.0.clone().cos())
    }

    pub fn cosh(&self) -> Self {
        Real(self.0.clone().cosh())
    }

    pub fn floor(&self) -> Self {
        Real(self.0.clone().floor())
    }

    /// `self^exponent` for real exponents; the base must be nonnegative.
    pub fn pow(&self, exponent: &Real) -> Self {
        let prec = self.prec().min(exponent.prec());
        Real(Float::with_val(prec, (&self.0).pow(&exponent.0)))
    }

    pub fn powi(&self, exponent: i64) -> Self {
        Real(Float::with_val(self.prec(), (&self.0).pow(exponent)))
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(&self, k: i32) -> Self {
        let mut v = self.0.clone();
        if k >= 0 {
            v <<= k as u32;
        } else {
            v >>= (-k) as u32;
        }
        Real(v)
    }

    /// Approximate base-2 logarithm of `|self|` (`-inf` for zero), cheap.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mantissa, exp) = self.0.to_f64_exp();
        mantissa.abs().log2() + exp as f64
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Shortest decimal string that reads back to the identical value at this precision.
    pub fn to_decimal_string(&self) -> String {
        self.0.to_string_radix(10, None)
    }

    /// Decimal string with at most `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }

    /// Correctly rounded sum of many terms at `prec` bits.
    pub fn sum_of<'a, I>(terms: I, prec: u32) -> Real
    where
        I: IntoIterator<Item = &'a Real>,
    {
        let floats: Vec<&Float> = terms.into_iter().map(|r| &r.0).collect();
        Real(Float::with_val(prec.max(MIN_PRECISION), Float::sum(floats.into_iter())))
    }

    /// Correctly rounded dot product at `prec` bits.
    pub fn dot(a: &[Real], b: &[Real], prec: u32) -> Real {
        debug_assert_eq!(a.len(), b.len());
        let pairs = a.iter().zip(b).map(|(x, y)| (&x.0, &y.0));
        Real(Float::with_val(prec.max(MIN_PRECISION), Float::dot(pairs)))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(24)))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.0.to_string_radix(10, Some(p.max(1)))),
            None => write!(f, "{}", self.0.to_string_radix(10, Some(20))),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let prec = self.prec().min(rhs.prec());
                Real(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                &self $op rhs
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                &self $op &rhs
            }
        }
        impl $tr<i64> for &Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                Real(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<i64> for Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                &self $op rhs
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                Real(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $method(self, rhs: f64) -> Real {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

macro_rules! assignop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Real> for Real {
            fn $method(&mut self, rhs: &Real) {
                *self = &*self $op rhs;
            }
        }
        impl $tr<Real> for Real {
            fn $method(&mut self, rhs: Real) {
                *self = &*self $op &rhs;
            }
        }
        impl $tr<i64> for Real {
            fn $method(&mut self, rhs: i64) {
                *self = &*self $op rhs;
            }
        }
    };
}

assignop!(AddAssign, add_assign, +);
assignop!(SubAssign, sub_assign, -);
assignop!(MulAssign, mul_assign, *);
assignop!(DivAssign, div_assign, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.prec(), -&self.0))
    }
}

impl<'a> Sum<&'a Real> for Real {
    /// Panics on an empty iterator (no precision to infer); use [`Real::sum_of`] instead.
    fn sum<I: Iterator<Item = &'a Real>>(iter: I) -> Real {
        let terms: Vec<&Real> = iter.collect();
        let prec = terms.iter().map(|t| t.prec()).min().expect("sum of no terms");
        Real::sum_of(terms, prec)
    }
}
