//! Scalar field abstraction.
//!
//! Exact mode uses `BigRational`, float mode uses `f64`. Complex evaluation
//! points wrap either in `Complex<_>`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num::bigint::BigInt;
use num::{BigRational, Complex, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + Display + PartialEq + Send + Sync + 'static {
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn conj(&self) -> Self;

    /// |x|^2, embedded back into the field.
    fn abs_sq(&self) -> Self;

    /// |x| as a float, for scaling and reporting only.
    fn magnitude(&self) -> f64;

    fn modulus_lt_one(&self) -> bool;

    /// Exact equality in exact mode, `|a-b| <= tol` otherwise.
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).magnitude() <= tol
        }
    }
}

pub trait RealScalar: Scalar + PartialOrd {
    fn to_f64(&self) -> f64;

    /// Exact for `Rational` (binary expansion of the float).
    fn from_f64(x: f64) -> Self;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn abs_sq(&self) -> Self {
        self * self
    }

    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN).abs()
    }

    fn modulus_lt_one(&self) -> bool {
        self.abs() < Rational::one()
    }
}

impl RealScalar for Rational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Rational::zero)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn conj(&self) -> Self {
        *self
    }

    fn abs_sq(&self) -> Self {
        self * self
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn modulus_lt_one(&self) -> bool {
        self.abs() < 1.0
    }
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }
}

impl<T: RealScalar> Scalar for Complex<T> {
    const EXACT: bool = T::EXACT;

    fn from_rational(r: &Rational) -> Self {
        Complex::new(T::from_rational(r), T::zero())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn abs_sq(&self) -> Self {
        let n = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        Complex::new(n, T::zero())
    }

    fn magnitude(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    fn modulus_lt_one(&self) -> bool {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone() < T::one()
    }
}

/// Lift a real scalar into the complex plane.
pub fn complex<T: RealScalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `p`, `p/q`, or a decimal such as `-0.25` or `1.5e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * num::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Parse directly into any scalar type.
pub fn parse_scalar<S: Scalar>(s: &str) -> Result<S> {
    parse_rational(s).map(|r| S::from_rational(&r))
}

pub fn f64_to_rational(x: f64) -> Option<Rational> {
    <Rational as num::FromPrimitive>::from_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("11").unwrap(), int(11));
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational("2e2").unwrap(), int(200));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn complex_conj_and_modulus() {
        let z = Complex::new(rat(1, 2), rat(1, 2));
        assert_eq!(z.conj(), Complex::new(rat(1, 2), rat(-1, 2)));
        assert_eq!(z.abs_sq(), complex(rat(1, 2)));
        assert!(z.modulus_lt_one());
        assert!(!Complex::new(1.0, 0.0).modulus_lt_one());
    }

    #[test]
    fn close_to_is_exact_for_rationals() {
        assert!(!rat(1, 3).close_to(&rat(1, 3000000000), 1.0));
        assert!(1.0f64.close_to(&(1.0 + 1e-12), 1e-10));
    }
}
