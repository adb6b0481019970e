//! Scalar backends.
//!
//! Every construction in the crate is generic over [`Scalar`]. Two backends
//! exist: exact arbitrary-precision rationals ([`Rational`]) and
//! double-precision complex numbers ([`Complex64`]). Because the backend is a
//! type parameter, mixing backends inside one computation does not compile.

use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Magnitude below which a float denominator counts as a pole.
pub const FLOAT_POLE_TOL: f64 = 1e-8;
/// Residual below which a float identity check passes.
pub const FLOAT_PASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
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
    const BACKEND: Backend;

    fn from_rational(r: &Rational) -> Self;

    /// True when `self` must be treated as zero for pole rejection.
    fn is_negligible(&self) -> bool;

    fn magnitude(&self) -> Residual;

    fn to_value(&self) -> Value;

    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn div_ref(&self, rhs: &Self) -> Self;

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }

    fn from_int(i: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(i)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Multiplicative inverse, rejecting (near-)zero values.
    fn checked_inv(&self) -> Result<Self> {
        if self.is_negligible() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Self::one() / self.clone())
        }
    }

    /// Integer power; negative exponents invert first.
    fn powi(&self, exp: i64) -> Self {
        let base = if exp < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        acc
    }

    fn sign_power(parity: u8) -> Self {
        if parity % 2 == 0 {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn magnitude(&self) -> Residual {
        Residual::Exact(self.abs())
    }

    fn to_value(&self) -> Value {
        Value::Exact(self.clone())
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }

    fn is_negligible(&self) -> bool {
        self.norm() < FLOAT_POLE_TOL
    }

    fn magnitude(&self) -> Residual {
        Residual::Float(self.norm())
    }

    fn to_value(&self) -> Value {
        Value::Complex(*self)
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Formats a rational as `"num/den"`; integers keep the `/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"3"`, `"-2/5"` or `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    BigInt::from_str(t).map(Rational::from_integer).map_err(|_| bad())
}

/// A scalar value extracted for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Complex(Complex64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&format_rational(r)),
            Value::Complex(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Value::Complex(c) => write!(f, "{}{:+}i", c.re, c.im),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Max-norm residual of an identity check.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    Exact(Rational),
    Float(f64),
}

impl Residual {
    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Residual::Exact(Rational::zero()),
            Backend::Float => Residual::Float(0.0),
        }
    }

    /// Exact residuals pass only at literal zero; float ones below [`FLOAT_PASS_TOL`].
    pub fn passes(&self) -> bool {
        match self {
            Residual::Exact(r) => r.is_zero(),
            Residual::Float(x) => x.is_finite() && *x < FLOAT_PASS_TOL,
        }
    }

    /// Float residuals become relative to `scale` once it exceeds 1; exact ones are untouched.
    pub fn relative_to(self, scale: &Residual) -> Residual {
        match self {
            Residual::Float(x) => Residual::Float(x / scale.as_f64().max(1.0)),
            exact => exact,
        }
    }

    pub fn max(self, other: Residual) -> Residual {
        match (self, other) {
            (Residual::Exact(a), Residual::Exact(b)) => Residual::Exact(if a >= b { a } else { b }),
            (Residual::Float(a), Residual::Float(b)) => {
                if a.is_nan() || b.is_nan() {
                    Residual::Float(f64::NAN)
                } else {
                    Residual::Float(a.max(b))
                }
            }
            // unreachable through the generic API; keep the float side
            (Residual::Exact(a), Residual::Float(b)) | (Residual::Float(b), Residual::Exact(a)) => {
                Residual::Float(rational_to_f64(&a).max(b))
            }
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Residual::Exact(r) => rational_to_f64(r),
            Residual::Float(x) => *x,
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(r) => f.write_str(&format_rational(r)),
            Residual::Float(x) => write!(f, "{x:e}"),
        }
    }
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Max-norm over an iterator of scalars; an empty iterator gives zero.
pub fn max_magnitude<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> Residual {
    values.into_iter().fold(Residual::zero(S::BACKEND), |acc, v| acc.max(v.magnitude()))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
