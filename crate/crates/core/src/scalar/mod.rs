//! Arbitrary-precision reals, the exact-expression grammar and special
//! functions.
//!
//! A [`Scalar`] is an MPFR float that remembers its precision. Binary
//! operations run at the smaller of the two operand precisions, so a value
//! never silently gains bits it was not computed with.
//!
//! Error budget: every elementary operation is correctly rounded, and the
//! operation chains used by the geometry pipeline are at most a few dozen
//! steps deep with no catastrophic cancellation in the evaluated quantities,
//! so results carry a relative error below `2^(4-p)` at precision `p`.
//! Expression evaluation adds 32 guard bits internally for the same reason.

mod expr;
pub mod special;

pub use expr::{eval_expr, parse_expr, print_expr, ExactExpr};
pub use special::{
    d3_infinity_series, d3_inner_series, dirichlet_beta, dirichlet_l, hurwitz_zeta, legendre_symbol, zeta,
};

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real number carried at a fixed binary precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Scalar(Float);

impl Scalar {
    pub fn from_float(value: Float) -> Self {
        Scalar(value)
    }

    pub fn from_int(value: i64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, value))
    }

    pub fn from_integer(value: &Integer, prec: u32) -> Self {
        Scalar(Float::with_val(prec, value))
    }

    pub fn from_rational(value: &Rational, prec: u32) -> Self {
        Scalar(Float::with_val(prec, value))
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, Rational::from((num, den))))
    }

    pub fn from_f64(value: f64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, value))
    }

    pub fn zero(prec: u32) -> Self {
        Scalar(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn pi(prec: u32) -> Self {
        Scalar(Float::with_val(prec, Constant::Pi))
    }

    /// `2^exp` at the given precision; used to build tolerances.
    pub fn pow2(exp: i32, prec: u32) -> Self {
        Scalar(Float::with_val(prec, 1) << exp)
    }

    /// Tolerance `2^(slack - prec)` relative to this scalar's precision.
    pub fn epsilon(prec: u32, slack_bits: i32) -> Self {
        Self::pow2(slack_bits - prec as i32, prec)
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Rounds (or widens) to a new precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        Scalar(Float::with_val(prec, &self.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Less)
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Greater)
    }

    /// `|self| <= tol`.
    pub fn is_zero_within(&self, tol: &Scalar) -> bool {
        self.abs() <= *tol
    }

    /// Sign with an explicit dead zone: values within `tol` of zero are `0`.
    pub fn sign_within(&self, tol: &Scalar) -> i8 {
        if self.is_zero_within(tol) {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.clone().abs())
    }

    pub fn square(&self) -> Self {
        Scalar(self.0.clone().square())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Evaluation("division by zero".into()));
        }
        Ok(Scalar(self.0.clone().recip()))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Evaluation(format!("square root of negative value {}", self.to_digits(12))));
        }
        Ok(Scalar(self.0.clone().sqrt()))
    }

    pub fn exp(&self) -> Self {
        Scalar(self.0.clone().exp())
    }

    pub fn ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::Evaluation("logarithm of non-positive value".into()));
        }
        Ok(Scalar(self.0.clone().ln()))
    }

    pub fn sinh(&self) -> Self {
        Scalar(self.0.clone().sinh())
    }

    pub fn cosh(&self) -> Self {
        Scalar(self.0.clone().cosh())
    }

    pub fn tanh(&self) -> Self {
        Scalar(self.0.clone().tanh())
    }

    pub fn atanh(&self) -> Result<Self> {
        if self.abs() >= Scalar::one(self.precision()) {
            return Err(Error::Evaluation("artanh argument outside (-1, 1)".into()));
        }
        Ok(Scalar(self.0.clone().atanh()))
    }

    pub fn acosh(&self) -> Result<Self> {
        if self.0 < 1 {
            return Err(Error::Evaluation("arcosh argument below 1".into()));
        }
        Ok(Scalar(self.0.clone().acosh()))
    }

    pub fn cos(&self) -> Self {
        Scalar(self.0.clone().cos())
    }

    pub fn sin(&self) -> Self {
        Scalar(self.0.clone().sin())
    }

    pub fn powi(&self, exp: i32) -> Self {
        Scalar(self.0.clone().pow(exp))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `|self - other| / max(|other|, tiny)`.
    pub fn rel_diff(&self, other: &Scalar) -> Scalar {
        let diff = (self - other).abs();
        if other.is_zero() {
            return diff;
        }
        diff / other.abs()
    }

    /// Decimal rendering with `digits` significant digits. Positional for
    /// moderate exponents, scientific otherwise.
    pub fn to_digits(&self, digits: usize) -> String {
        format_significant(&self.0, digits.max(1))
    }
}

fn format_significant(value: &Float, digits: usize) -> String {
    if value.is_nan() {
        return "NaN".into();
    }
    if value.is_infinite() {
        return if value.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    let (negative, mantissa, exp) = value.to_sign_string_exp(10, Some(digits));
    let exp = match exp {
        Some(e) => e,
        None => return "0".into(),
    };
    let sign = if negative { "-" } else { "" };
    let mantissa = mantissa.as_str();
    if (-6..=21).contains(&exp) {
        if exp <= 0 {
            format!("{sign}0.{}{mantissa}", "0".repeat((-exp) as usize))
        } else if (exp as usize) >= mantissa.len() {
            format!("{sign}{mantissa}{}", "0".repeat(exp as usize - mantissa.len()))
        } else {
            let (int, frac) = mantissa.split_at(exp as usize);
            format!("{sign}{int}.{frac}")
        }
    } else {
        let (first, rest) = mantissa.split_at(1);
        format!("{sign}{first}.{rest}e{}", exp - 1)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.write_str(&self.to_digits(digits))
    }
}

fn min_prec(a: &Scalar, b: &Scalar) -> u32 {
    a.0.prec().min(b.0.prec())
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(Float::with_val(min_prec(self, rhs), &self.0 $op &rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
        impl $trait<i64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                Scalar(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $trait<i64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);
binary_op!(Div, div, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(Float::with_val(self.0.prec(), -&self.0))
    }
}

impl PartialEq<i64> for Scalar {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for Scalar {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

/// Sum with a single rounding per term at the precision of the first term.
pub fn sum<'a, I: IntoIterator<Item = &'a Scalar>>(terms: I, prec: u32) -> Scalar {
    let mut acc = Float::new(prec);
    for t in terms {
        acc += &t.0;
    }
    Scalar(acc)
}
