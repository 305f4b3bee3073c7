//! Dense univariate polynomials over a [`Scalar`] field.
//!
//! Coefficients are stored ascending by degree with trailing zeros trimmed,
//! so the zero polynomial is the empty vector and has degree -1.

use std::ops::{Add, Mul, Neg, Sub};

use num::Complex;
use serde_json::Value;

use crate::scalar::{RealScalar, Scalar};

/// A family and its companion family, indexed by degree.
pub type PolyPair<S> = (Vec<Poly<S>>, Vec<Poly<S>>);

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

/// The spec's MonicPolynomial; monicity is an invariant of the families, not the type.
pub type MonicPolynomial<S> = Poly<S>;

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// z - a
    pub fn linear(a: S) -> Self {
        Self::new(vec![-a, S::one()])
    }

    pub fn x() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    pub fn monomial(n: usize) -> Self {
        let mut v = vec![S::zero(); n + 1];
        v[n] = S::one();
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of z^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    /// Evaluate at a point of a larger field, e.g. real coefficients at complex z.
    pub fn eval_in<T: Scalar + From<S>>(&self, z: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * z.clone() + T::from(c.clone()))
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Multiply by z - a.
    pub fn mul_linear(&self, a: &S) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let mut out = vec![S::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1] = out[i + 1].clone() + c.clone();
            out[i] = out[i].clone() - c.clone() * a.clone();
        }
        Self::new(out)
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![S::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// z^n * conj(p(1 / conj z)): coefficient reversal with conjugation.
    pub fn reversed_conj(&self, n: usize) -> Self {
        let mut v = vec![S::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i <= n {
                v[n - i] = c.conj();
            }
        }
        Self::new(v)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let lead = d.leading().expect("division by the zero polynomial").clone();
        let dn = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dn {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![S::zero(); r.len() - dn];
        for i in (0..q.len()).rev() {
            let f = r[i + dn].clone() / lead.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                r[i + j] = r[i + j].clone() - f.clone() * c.clone();
            }
            q[i] = f;
        }
        r.truncate(dn);
        (Self::new(q), Self::new(r))
    }

    /// Monic gcd by Euclid; meaningful over exact fields.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = std::mem::replace(&mut b, r);
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&(S::one() / l)),
            None => a,
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).sum()
    }

    /// Coefficient-wise comparison; exact for exact scalars, otherwise within
    /// `tol * (1 + max |coeff|)`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if S::EXACT {
            return self == other;
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = 1.0 + self.coeffs.iter().chain(other.coeffs.iter()).map(|c| c.magnitude()).fold(0.0, f64::max);
        (0..n).all(|i| (self.coeff(i) - other.coeff(i)).magnitude() <= tol * scale)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| Value::String(c.to_string())).collect())
    }
}

impl<S: RealScalar> Poly<S> {
    pub fn to_f64(&self) -> Poly<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn to_complex(&self) -> Poly<Complex<S>> {
        self.map(|c| Complex::new(c.clone(), S::zero()))
    }
}

impl<S: RealScalar> Poly<Complex<S>> {
    /// Real part, if every imaginary part vanishes.
    pub fn real(&self) -> Option<Poly<S>> {
        if self.coeffs.iter().all(|c| c.im.is_zero()) {
            Some(self.map(|c| c.re.clone()))
        } else {
            None
        }
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: Poly<S>) -> Poly<S> {
                (&self).$m(&rhs)
            }
        }
        impl<S: Scalar> $tr<&Poly<S>> for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: &Poly<S>) -> Poly<S> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}

impl<S: Scalar> std::fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

/// 2x2 matrix of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<S> {
    pub m: [[Poly<S>; 2]; 2],
}

impl<S: Scalar> PolyMatrix<S> {
    pub fn new(a: Poly<S>, b: Poly<S>, c: Poly<S>, d: Poly<S>) -> Self {
        PolyMatrix { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }

    pub fn det(&self) -> Poly<S> {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let e = |i: usize, j: usize| &self.m[i][0] * &rhs.m[0][j] + &self.m[i][1] * &rhs.m[1][j];
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn apply(&self, v: &[Poly<S>; 2]) -> [Poly<S>; 2] {
        [&self.m[0][0] * &v[0] + &self.m[0][1] * &v[1], &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1]]
    }

    /// Cofactor matrix [[m11, -m10], [-m01, m00]].
    pub fn cofactor(&self) -> Self {
        Self::new(self.m[1][1].clone(), -&self.m[1][0], -&self.m[0][1], self.m[0][0].clone())
    }

    /// Adjugate [[m11, -m01], [-m10, m00]].
    pub fn adjugate(&self) -> Self {
        Self::new(self.m[1][1].clone(), -&self.m[0][1], -&self.m[1][0], self.m[0][0].clone())
    }

    pub fn scale(&self, p: &Poly<S>) -> Self {
        Self::new(&self.m[0][0] * p, &self.m[0][1] * p, &self.m[1][0] * p, &self.m[1][1] * p)
    }
}
